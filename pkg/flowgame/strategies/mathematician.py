"""
Mathematician strategies for the finite game.

All of them are written for the unit game and act through a `ScaledView`, so the same code plays
at the root and inside any subtree with any budget share.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Dict, List, Mapping, Optional, Tuple

import structlog

from flowgame.certificates.cert import StrategyCert
from flowgame.errors import ConfigError, InternalExhaustion
from flowgame.game.rationals import ZERO, Rational, as_fraction
from flowgame.game.state import max_ratio_path
from flowgame.game.tree import ROOT, NodeId
from flowgame.game.view import ScaledView, scale_view
from flowgame.strategies.base import MStrategy, Response, StrategyEvent, hypothetical_best

logger = structlog.get_logger(__name__)

QUARTER = Fraction(1, 4)
HALF = Fraction(1, 2)


class TrivialStrategy(MStrategy):
    """Spend the whole budget on the view root once; the sum is budget/flow on every leaf below."""

    name = "trivial"

    def __init__(self) -> None:
        super().__init__()
        self.played = False

    def respond(self, view: ScaledView, event: StrategyEvent) -> Response:
        response = Response()
        if not self.played:
            self.played = True
            node, value = view.place(ROOT, 1)
            response.updates[node] = value
            self.claim = view.root
        response.claim = self.claim
        return response


def toy_policy(
    weight: Callable[[NodeId], Fraction],
    flow: Callable[[NodeId], Fraction],
    k: Fraction,
) -> Dict[NodeId, Fraction]:
    """Next unit-game weights of the height-2 toy strategy given normalized weights and flows.

    Opens with 1/4 on 0 and on 00. Afterwards it commits its last half once: to vertex 1 when a(0)
    leaves at most 1/(2k) for the right subtree, else to 01 when that alone restores a winning
    position.
    """
    if weight("0") == 0:
        return {"0": QUARTER, "00": QUARTER}
    if weight("1") or weight("01"):
        return {}
    if flow("0") >= 1 - 1 / (2 * k):
        return {"1": HALF}
    trial = {"0": QUARTER, "00": QUARTER, "01": HALF}
    _, total = max_ratio_path(trial, flow, 2)
    if total >= k:
        return {"01": HALF}
    return {}


class ToyStrategy(MStrategy):
    name = "toy"

    def __init__(self, k: Optional[Rational] = None) -> None:
        super().__init__()
        self.k = as_fraction(k) if k is not None else None

    def unit_target(self, view: ScaledView) -> Fraction:
        if self.k is not None:
            return self.k
        # the game target expressed in unit-game terms
        return view.state.config.target * view.assumed_flow / view.budget

    def respond(self, view: ScaledView, event: StrategyEvent) -> Response:
        if view.height < 2:
            raise ConfigError("the toy strategy needs a subtree of height 2")
        shares = toy_policy(
            lambda x: view.weight(x) / view.budget,
            view.flow_ratio,
            self.unit_target(view),
        )
        response = Response(updates=dict(view.place(x, share) for x, share in shares.items()))
        self.claim, _ = hypothetical_best(view, response.updates)
        response.claim = self.claim
        return response


class RecursiveStrategy(MStrategy):
    """(k+ε) strategy built on a k-strategy, driven by a certificate.

    Vertex 0 gets ε once. Left subgames i = 1..n run the child with budget (1−ε)/n against an
    assumed flow a_i. If a(0) reaches d_i the strategy moves for good to the threat subtree under
    vertex 1 with budget (1−ε)(1−i/n) against 1−d_i; if the flow into subgame i reaches a_i it
    starts subgame i+1.
    """

    name = "recursive"

    def __init__(self, cert: StrategyCert) -> None:
        super().__init__()
        if cert.is_base or cert.child is None:
            raise ConfigError("the recursive strategy needs a certificate above the base")
        self.cert = cert
        self.started = False
        self.subgame = 0
        self.threatened = False
        self.root: NodeId = ROOT
        self.child: Optional[MStrategy] = None
        self._budget_share = ZERO
        self._flow_share = ZERO
        self.roots: List[Tuple[str, NodeId]] = []

    # hooks for root placement -------------------------------------------------

    def _make_child(self) -> MStrategy:
        assert self.cert.child is not None
        return strategy_for_cert(self.cert.child)

    def _left_root(self, i: int) -> NodeId:
        return self.cert.z(i)

    def _threat_root(self) -> NodeId:
        return "1"

    # --------------------------------------------------------------------------

    def _start_left(self, i: int) -> None:
        cert = self.cert
        self.subgame = i
        self.root = self._left_root(i)
        self._budget_share = (1 - cert.eps) / cert.n
        self._flow_share = cert.aq[i - 1]
        self.child = self._make_child()
        self.roots.append(("left", self.root))

    def _start_threat(self) -> None:
        cert = self.cert
        i = self.subgame
        self.threatened = True
        self.root = self._threat_root()
        self._budget_share = (1 - cert.eps) * (1 - Fraction(i, cert.n))
        self._flow_share = 1 - cert.d[i - 1]
        self.child = self._make_child()
        self.roots.append(("threat", self.root))
        logger.debug("threat_switch", k=str(cert.guarantee), subgame=i, root=self.root)

    def _resolve_triggers(self, view: ScaledView) -> None:
        cert = self.cert
        unit = view.assumed_flow
        while not self.threatened:
            i = self.subgame
            if i < cert.n and view.flow("0") >= cert.d[i - 1] * unit:
                self._start_threat()
                return
            if view.flow(self.root) >= cert.aq[i - 1] * unit:
                if i == cert.n:
                    raise InternalExhaustion(
                        f"flow reached every quota of k={cert.guarantee}; S={cert.S} should forbid it"
                    )
                self._start_left(i + 1)
                continue
            return

    def respond(self, view: ScaledView, event: StrategyEvent) -> Response:
        response = Response()
        if not self.started:
            self.started = True
            node, value = view.place("0", self.cert.eps)
            response.updates[node] = value
            self._start_left(1)
        self._resolve_triggers(view)
        assert self.child is not None
        child_view = view.subview(self.root, self._budget_share, self._flow_share)
        child_response = self.child.respond(child_view, event)
        response.merge(child_response)
        self.claim = child_response.claim
        response.claim = self.claim
        return response


class ScaledStrategy(MStrategy):
    """Run a unit-game strategy at `root` with an absolute budget and an assumed root flow."""

    def __init__(
        self,
        inner: MStrategy,
        root: NodeId,
        budget_share: Rational,
        assumed_flow: Rational,
        depth: Optional[int] = None,
    ) -> None:
        super().__init__()
        self.inner = inner
        self.root = root
        self.budget_share = as_fraction(budget_share)
        self.assumed_flow = as_fraction(assumed_flow)
        self.depth = depth
        self.name = f"scaled({inner.name})"

    def respond(self, view: ScaledView, event: StrategyEvent) -> Response:
        sub = scale_view(view.state, self.root, self.assumed_flow, self.budget_share, depth=self.depth)
        response = self.inner.respond(sub, event)
        self.claim = response.claim
        return response


class OneShotStrategy(MStrategy):
    """Play a fixed weight map on the first turn, then only keep pointing at the best leaf."""

    name = "one_shot"

    def __init__(self, weights: Mapping[NodeId, Rational]) -> None:
        super().__init__()
        self.weights = {node: as_fraction(share) for node, share in weights.items()}
        self.played = False

    def respond(self, view: ScaledView, event: StrategyEvent) -> Response:
        response = Response()
        if not self.played:
            self.played = True
            response.updates = dict(view.place(node, share) for node, share in self.weights.items())
        self.claim, _ = hypothetical_best(view, response.updates)
        response.claim = self.claim
        return response


def strategy_for_cert(cert: StrategyCert) -> MStrategy:
    if cert.is_base:
        return TrivialStrategy()
    return RecursiveStrategy(cert)


def trivial_strategy() -> TrivialStrategy:
    return TrivialStrategy()


def toy_strategy(k: Optional[Rational] = None) -> ToyStrategy:
    return ToyStrategy(k)


def recursive_strategy(cert: StrategyCert) -> MStrategy:
    return strategy_for_cert(cert)


def scaled(
    strategy: MStrategy,
    root: NodeId,
    budget_share: Rational,
    assumed_flow: Rational,
    depth: Optional[int] = None,
) -> ScaledStrategy:
    return ScaledStrategy(strategy, root, budget_share, assumed_flow, depth=depth)


def one_shot_strategy(weights: Mapping[NodeId, Rational]) -> OneShotStrategy:
    return OneShotStrategy(weights)
