"""
Layered driver for the unbounded game.

Layer j gets a quota μ_j = 2^-e_j of the budget and runs a ladder certificate for k_j = s·2^e_j,
so it targets an in-subtree sum of s against a root flow of at most 1. Layer j+1 lives below the
leaf that layer j currently claims. When that leaf moves, every layer above is discarded and
restarted lazily below the new one, as long as the budget ledger still covers the fresh quotas.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import structlog

from flowgame.certificates.cert import BASE_CERT, Ladder, StrategyCert, ladder
from flowgame.errors import ConfigError
from flowgame.game.rationals import ZERO, ExtRat, Rational, as_fraction, format_rat, parse_rat
from flowgame.game.tree import NodeId, leftmost_leaf
from flowgame.game.view import ScaledView
from flowgame.settings import settings
from flowgame.strategies.base import MStrategy, Response, StrategyEvent
from flowgame.strategies.mathematician import strategy_for_cert

logger = structlog.get_logger(__name__)


@dataclass
class Layer:
    index: int
    cert: StrategyCert
    quota: Fraction
    root: Optional[NodeId] = None
    anchor: Optional[NodeId] = None
    strategy: Optional[MStrategy] = None
    spent: Fraction = ZERO
    starts: int = 0
    # would-be root of an unstarted layer, keyed by its anchor
    pending: Optional[Tuple[NodeId, NodeId]] = None
    # (root, depth) of every subtree this layer has occupied
    history: List[Tuple[NodeId, int]] = field(default_factory=list)
    # deepest node this incarnation has weighted
    reach: int = 0
    # the claim an upper layer hangs from and the anchor it was padded to
    pinned: Optional[Tuple[NodeId, NodeId]] = None

    @property
    def live(self) -> bool:
        return self.strategy is not None

    @property
    def claim(self) -> Optional[NodeId]:
        return self.strategy.claim if self.strategy is not None else None


class LayeredDriver(MStrategy):
    name = "layered"

    def __init__(
        self,
        quota_exponents: Sequence[int],
        layer_sum: Optional[Rational] = None,
        max_rungs: Optional[int] = None,
    ) -> None:
        super().__init__()
        exponents = list(quota_exponents)
        if not exponents or any(e < 0 for e in exponents):
            raise ConfigError("quota exponents must be a non-empty list of non-negative integers")
        self.layer_sum = as_fraction(layer_sum) if layer_sum is not None else parse_rat(settings.LAYER_SUM)
        if self.layer_sum <= 0:
            raise ConfigError("layer_sum must be positive")
        quotas = [Fraction(1, 1 << e) for e in exponents]
        if sum(quotas, ZERO) > 1:
            raise ConfigError(f"quotas {[format_rat(q) for q in quotas]} exceed the budget")
        targets = [self.layer_sum * (1 << e) for e in exponents]
        top = max(targets)
        self.ladder: Optional[Ladder] = ladder(top, max_rungs=max_rungs) if top > 1 else None
        self.layers = [
            Layer(index=j, cert=self._cert_for(k), quota=mu)
            for j, (k, mu) in enumerate(zip(targets, quotas))
        ]
        self.reserved = sum(quotas, ZERO)
        self.discarded_spent = ZERO
        self.restarts = 0
        self.denied = 0
        self.view: Optional[ScaledView] = None

    def _cert_for(self, k: Fraction) -> StrategyCert:
        if k <= 1 or self.ladder is None:
            return BASE_CERT
        return self.ladder.for_target(k)

    # hooks for the monotone driver ----------------------------------------------

    def _layer_depth(self, cert: StrategyCert) -> int:
        return cert.height

    def _make_layer_strategy(self, cert: StrategyCert) -> MStrategy:
        return strategy_for_cert(cert)

    def _anchor_depth(self, below: Layer) -> int:
        assert below.root is not None
        return len(below.root) + self._layer_depth(below.cert)

    def _layer_extent(self, layer: Layer) -> int:
        assert layer.root is not None
        return len(layer.root) + self._layer_depth(layer.cert)

    def _layer_root(self, anchor: NodeId, layer: Layer) -> NodeId:
        # a fresh sibling subtree below the anchor for every restart at it
        previous = sum(1 for root, _ in layer.history if root.startswith(anchor))
        return anchor + "1" * previous + "0"

    # --------------------------------------------------------------------------

    def _anchor_for(self, j: int, view: ScaledView) -> Optional[NodeId]:
        """Node layer j hangs from: the view root, or the padded claim of layer j−1."""
        if j == 0:
            return view.root
        below = self.layers[j - 1]
        claim = below.claim
        if claim is None or below.root is None:
            return None
        if below.pinned is None or below.pinned[0] != claim:
            below.pinned = (claim, leftmost_leaf(claim, max(len(claim), self._anchor_depth(below))))
        return below.pinned[1]

    def _root_for(self, layer: Layer, anchor: NodeId) -> NodeId:
        if layer.index == 0:
            return anchor
        if layer.pending is None or layer.pending[0] != anchor:
            layer.pending = (anchor, self._layer_root(anchor, layer))
        return layer.pending[1]

    def _start(self, layer: Layer, anchor: NodeId) -> None:
        root = self._root_for(layer, anchor)
        layer.pending = None
        layer.root = root
        layer.anchor = anchor
        layer.strategy = self._make_layer_strategy(layer.cert)
        layer.spent = ZERO
        layer.reach = len(root)
        layer.pinned = None
        layer.starts += 1
        layer.history.append((root, self._layer_extent(layer) - len(root)))
        logger.debug("layer_started", layer=layer.index, root=root, starts=layer.starts)

    def _discard_from(self, j: int) -> None:
        for layer in self.layers[j:]:
            if layer.live:
                assert layer.root is not None
                self.discarded_spent += layer.spent
                layer.history[-1] = (layer.root, self._layer_extent(layer) - len(layer.root))
            layer.strategy = None
            layer.spent = ZERO
        logger.debug("layers_discarded", first=j, discarded_spent=format_rat(self.discarded_spent))

    def _may_start(self, layer: Layer) -> bool:
        if layer.starts == 0:
            return True
        return self.discarded_spent + self.reserved <= 1

    def _layer_view(self, view: ScaledView, layer: Layer) -> ScaledView:
        assert layer.root is not None
        return ScaledView(
            state=view.state,
            root=layer.root,
            assumed_flow=view.assumed_flow,
            budget=view.budget * layer.quota,
            depth=self._layer_depth(layer.cert),
        )

    def respond(self, view: ScaledView, event: StrategyEvent) -> Response:
        self.view = view
        response = Response()
        weights = dict(view.state.m)
        for j, layer in enumerate(self.layers):
            anchor = self._anchor_for(j, view)
            if layer.live and anchor != layer.anchor:
                self._discard_from(j)
            if not layer.live:
                if anchor is None or not self._may_start(layer):
                    if anchor is not None and layer.starts:
                        self.denied += 1
                    break
                if layer.starts:
                    self.restarts += 1
                self._start(layer, anchor)
            assert layer.strategy is not None
            layer_response = layer.strategy.respond(self._layer_view(view, layer), event)
            for node, value in layer_response.updates.items():
                layer.spent += (value - weights.get(node, ZERO)) / view.budget
                layer.reach = max(layer.reach, len(node))
                weights[node] = value
            response.merge(layer_response)
        needed = self.needed_height()
        if needed > view.state.height:
            response.height = needed if response.height is None else max(response.height, needed)
        self.claim = self.current_branch()
        response.claim = self.claim
        return response

    def needed_height(self) -> int:
        return max(
            (self._layer_extent(layer) for layer in self.layers if layer.live and layer.root is not None),
            default=0,
        )

    def unstarted(self) -> List[int]:
        return [layer.index for layer in self.layers if not layer.live]

    def current_branch(self) -> Optional[NodeId]:
        """Top live layer's claim, extended by the would-be root of the first unstarted layer."""
        if self.view is None:
            return None
        live = [layer for layer in self.layers if layer.live]
        if len(live) == len(self.layers):
            return live[-1].claim
        first = self.layers[len(live)]
        anchor = self._anchor_for(first.index, self.view)
        if anchor is None:
            return live[-1].claim if live else None
        return self._root_for(first, anchor)

    def layer_sums(self) -> List[ExtRat]:
        """Σ m/a along the branch inside each live layer, from its root to its claim."""
        if self.view is None:
            return []
        sums: List[ExtRat] = []
        for layer in self.layers:
            if not layer.live or layer.claim is None:
                break
            sums.append(self._layer_view(self.view, layer).subtree_sum(layer.claim))
        return sums

    def partial_sum(self) -> ExtRat:
        total: ExtRat = ZERO
        for value in self.layer_sums():
            total = total + value
        return total


def layered_driver(
    quota_exponents: Sequence[int],
    layer_sum: Optional[Rational] = None,
    max_rungs: Optional[int] = None,
) -> LayeredDriver:
    return LayeredDriver(quota_exponents, layer_sum=layer_sum, max_rungs=max_rungs)
