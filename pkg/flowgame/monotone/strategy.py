"""
Monotone variants of the recursive strategy and the layered driver.

Subgame roots are placed with `place_subgame_root`, so every claim change adds ones to the marked
branch and never removes any.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Callable, Optional, Sequence

from flowgame.certificates.cert import StrategyCert
from flowgame.errors import MonotonicityViolation
from flowgame.game.rationals import Rational
from flowgame.game.tree import ROOT, NodeId
from flowgame.game.view import ScaledView
from flowgame.monotone.branch import MarkedBranch, MarkRecord, RootKind, dominates, place_subgame_root
from flowgame.strategies.base import MStrategy, Response, StrategyEvent
from flowgame.strategies.layered import Layer, LayeredDriver
from flowgame.strategies.mathematician import RecursiveStrategy, TrivialStrategy


class MonotoneRecursiveStrategy(RecursiveStrategy):
    name = "monotone_recursive"

    def __init__(self, cert: StrategyCert) -> None:
        super().__init__(cert)
        self.record = MarkRecord()
        self._origin: NodeId = ROOT
        self._height = cert.mono_height
        self._spine = -1
        # branch of the enclosing game; it extends this strategy's claim and may carry more ones
        self.outer: Optional[Callable[[], Optional[NodeId]]] = None

    def _local_branch(self) -> MarkedBranch:
        claim = self.claim
        outer = self.outer() if self.outer is not None else None
        if outer is not None and outer.startswith(claim if claim is not None else self._origin):
            claim = outer
        if claim is None:
            return MarkedBranch()
        return MarkedBranch.from_node(claim[len(self._origin) :])

    def _fit(self, root: NodeId) -> NodeId:
        assert self.cert.child is not None
        if len(root) + self.cert.child.mono_height > self._height:
            raise MonotonicityViolation(
                f"subgame root {root} with height {self.cert.child.mono_height} overflows height {self._height}"
            )
        return root

    def _make_child(self) -> MStrategy:
        assert self.cert.child is not None
        child = monotone_strategy_for_cert(self.cert.child)
        if isinstance(child, MonotoneRecursiveStrategy):
            child.outer = self.outer
        return child

    def _left_root(self, i: int) -> NodeId:
        root = place_subgame_root(RootKind.LEFT, self._local_branch(), previous=self._spine)
        self._spine = len(root) - 2
        return self._fit(root)

    def _threat_root(self) -> NodeId:
        return self._fit(place_subgame_root(RootKind.THREAT, self._local_branch()))

    def respond(self, view: ScaledView, event: StrategyEvent) -> Response:
        self._origin = view.root
        self._height = view.height
        response = super().respond(view, event)
        if self.claim is not None:
            self.record.mark(self.claim)
        return response

    def branch(self) -> MarkedBranch:
        return self.record.branch()


class MonotoneTrivialStrategy(TrivialStrategy):
    """Trivial strategy that also keeps a mark record; its mark never moves."""

    def __init__(self) -> None:
        super().__init__()
        self.record = MarkRecord()

    def respond(self, view: ScaledView, event: StrategyEvent) -> Response:
        response = super().respond(view, event)
        if self.claim is not None:
            self.record.mark(self.claim)
        return response


def monotone_strategy_for_cert(cert: StrategyCert) -> MStrategy:
    if cert.is_base:
        return MonotoneTrivialStrategy()
    return MonotoneRecursiveStrategy(cert)


def monotone_recursive_strategy(cert: StrategyCert) -> MStrategy:
    return monotone_strategy_for_cert(cert)


class MonotoneLayeredDriver(LayeredDriver):
    """Layered driver whose branch only ever gains ones."""

    name = "monotone_layered"

    def __init__(
        self,
        quota_exponents: Sequence[int],
        layer_sum: Optional[Rational] = None,
        max_rungs: Optional[int] = None,
    ) -> None:
        super().__init__(quota_exponents, layer_sum=layer_sum, max_rungs=max_rungs)
        self.marked = MarkedBranch()

    def _layer_depth(self, cert: StrategyCert) -> int:
        return cert.mono_height

    def _make_layer_strategy(self, cert: StrategyCert) -> MStrategy:
        strategy = monotone_strategy_for_cert(cert)
        if isinstance(strategy, MonotoneRecursiveStrategy):
            strategy.outer = lambda: self.claim
        return strategy

    def _anchor_depth(self, below: Layer) -> int:
        return below.reach

    def _layer_extent(self, layer: Layer) -> int:
        return layer.reach

    def _layer_view(self, view: ScaledView, layer: Layer) -> ScaledView:
        # ones of the marked branch push every root of the layer down by at most twice its length
        base = super()._layer_view(view, layer)
        return replace(base, depth=base.height + 2 * (len(self.claim or "") + 1))

    def _layer_root(self, anchor: NodeId, layer: Layer) -> NodeId:
        # below every subtree this layer ever used at the same anchor
        floor: Optional[int] = max(
            (len(root) + depth + 1 for root, depth in layer.history if root.startswith(anchor)),
            default=None,
        )
        return place_subgame_root(RootKind.LAYER_RESTART, self.marked, previous=floor, anchor=anchor)

    def respond(self, view: ScaledView, event: StrategyEvent) -> Response:
        response = super().respond(view, event)
        if self.claim is not None:
            branch = MarkedBranch.from_node(self.claim)
            if not dominates(self.marked, branch):
                raise MonotonicityViolation(f"branch {self.claim} drops ones of the marked branch")
            self.marked = branch
        return response

    def branch(self) -> MarkedBranch:
        return self.marked


def monotone_layered_driver(
    quota_exponents: Sequence[int],
    layer_sum: Optional[Rational] = None,
    max_rungs: Optional[int] = None,
) -> MonotoneLayeredDriver:
    return MonotoneLayeredDriver(quota_exponents, layer_sum=layer_sum, max_rungs=max_rungs)
