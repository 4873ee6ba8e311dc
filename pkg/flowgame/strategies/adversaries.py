"""
Adversary suite.

Every adversary raises flows through a `FlowPlan`, which only ever produces legal positions: a
node's flow goes up by borrowing its parent's slack first and lifting the parent (recursively)
for the rest, never above a chosen top node.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from flowgame.certificates.cert import StrategyCert
from flowgame.errors import ConfigError
from flowgame.game.rationals import ZERO, Rational, as_fraction, parse_rat
from flowgame.game.state import GameState, MoveDelta, Player, weighted_nodes
from flowgame.game.tree import ROOT, NodeId, children, parent, prefixes, sibling
from flowgame.game.view import ScaledView
from flowgame.measures import DiscreteSemimeasure, proportional_split
from flowgame.schemas import TraceEvent
from flowgame.settings import settings
from flowgame.strategies.base import AStrategy, Response, StrategyEvent


class FlowPlan:
    """Pending flow increases on top of a state."""

    def __init__(self, state: GameState) -> None:
        self.state = state
        self.values: Dict[NodeId, Fraction] = {}

    def flow(self, node: NodeId) -> Fraction:
        return self.values.get(node, self.state.flow(node))

    def slack(self, node: NodeId) -> Fraction:
        left, right = children(node)
        return self.flow(node) - self.flow(left) - self.flow(right)

    def capacity(self, node: NodeId, top: NodeId = ROOT) -> Fraction:
        """How far the flow at `node` can rise without touching `top` or Λ."""
        if node == ROOT or node == top or not node.startswith(top) or len(node) > self.state.height:
            return ZERO
        up = parent(node)
        cap = self.slack(up)
        if up != top and up != ROOT:
            cap += self.capacity(up, top)
        return cap

    def raise_by(self, node: NodeId, amount: Rational, top: NodeId = ROOT) -> Fraction:
        amount = min(as_fraction(amount), self.capacity(node, top))
        if amount <= 0:
            return ZERO
        self._lift(node, amount)
        return amount

    def raise_to(self, node: NodeId, value: Rational, top: NodeId = ROOT) -> Fraction:
        return self.raise_by(node, as_fraction(value) - self.flow(node), top)

    def _lift(self, node: NodeId, amount: Fraction) -> None:
        up = parent(node)
        shortfall = amount - self.slack(up)
        if shortfall > 0:
            self._lift(up, shortfall)
        self.values[node] = self.flow(node) + amount

    def updates(self) -> Dict[NodeId, Fraction]:
        return {
            node: self.values[node]
            for node in sorted(self.values, key=lambda x: (len(x), x))
            if self.values[node] > self.state.flow(node)
        }


def pour(state: GameState, node: NodeId, amount: Rational, top: NodeId = ROOT) -> Dict[NodeId, Fraction]:
    """Updates raising a(node) by up to `amount`, borrowing slack from the nearest ancestors first."""
    plan = FlowPlan(state)
    plan.raise_by(node, amount, top)
    return plan.updates()


class Silent(AStrategy):
    name = "silent"

    def respond(self, view: ScaledView, event: StrategyEvent) -> Response:
        return Response()


class GreedyAll(AStrategy):
    """Pour every available unit of flow into weighted nodes, shallowest first."""

    name = "greedy_all"

    def respond(self, view: ScaledView, event: StrategyEvent) -> Response:
        plan = FlowPlan(view.state)
        for node in weighted_nodes(view.state):
            if node != ROOT:
                plan.raise_by(node, plan.capacity(node))
        return Response(updates=plan.updates())


class ProportionalOnline(AStrategy):
    """Move toward the split of the root flow in proportion to the current weight masses.

    Targets come from `proportional_split` of the normalized weights. Flows cannot drop, so each
    pair of children gets its requested increase, scaled down to the parent's remaining slack.
    """

    name = "proportional_online"

    def respond(self, view: ScaledView, event: StrategyEvent) -> Response:
        state = view.state
        total = state.m_total
        if total == 0:
            return Response()
        measure = DiscreteSemimeasure(height=state.height, weights={x: w / total for x, w in state.m.items() if w})
        split = proportional_split(measure, root_value=state.config.root_flow)
        plan = FlowPlan(state)
        for node in sorted(split.explicit, key=lambda x: (len(x), x)):
            left, right = children(node)
            if len(node) >= state.height or left not in split.explicit:
                continue
            u0, u1 = plan.flow(left), plan.flow(right)
            r0 = max(ZERO, split.explicit[left] - u0)
            r1 = max(ZERO, split.explicit[right] - u1)
            wanted = r0 + r1
            if wanted == 0:
                continue
            avail = plan.flow(node) - u0 - u1
            if wanted > avail:
                r0, r1 = r0 * avail / wanted, r1 * avail / wanted
            plan.values[left] = u0 + r0
            plan.values[right] = u1 + r1
        return Response(updates=plan.updates())


class ThresholdDodger(AStrategy):
    """Push flow right up to the recursive strategy's triggers without crossing them.

    For the current subgame i it keeps a(0) at d_i − δ and fills subgame i up to a_i − δ. Once both
    stand it tops subgame i up to a_i, forcing the next subgame, until the flow under vertex 0 runs out.
    """

    name = "threshold_dodger"

    def __init__(self, cert: StrategyCert, delta: Optional[Rational] = None) -> None:
        if cert.is_base:
            raise ConfigError("threshold_dodger needs a certificate above the base")
        self.cert = cert
        self.delta = as_fraction(delta) if delta is not None else default_dodger_delta(cert)
        if self.delta <= 0:
            raise ConfigError("delta must be positive")

    def current_subgame(self, view: ScaledView) -> Optional[int]:
        unit = view.assumed_flow
        for i in range(1, self.cert.n + 1):
            if view.flow(self.cert.z(i)) < self.cert.aq[i - 1] * unit:
                return i
        return None

    def respond(self, view: ScaledView, event: StrategyEvent) -> Response:
        i = self.current_subgame(view)
        if i is None:
            return Response()
        cert, unit = self.cert, view.assumed_flow
        plan = FlowPlan(view.state)
        vertex0 = view.node("0")
        z = view.node(cert.z(i))
        plan.raise_to(vertex0, (cert.d[i - 1] - self.delta) * unit, top=view.root)
        plan.raise_to(z, (cert.aq[i - 1] - self.delta) * unit, top=vertex0)
        if not plan.updates():
            plan.raise_to(z, cert.aq[i - 1] * unit, top=vertex0)
        return Response(updates=plan.updates())


def default_dodger_delta(cert: StrategyCert) -> Fraction:
    gaps: List[Fraction] = [b - a for a, b in zip(cert.d, cert.d[1:])]
    gaps.extend(cert.aq)
    gaps.append(cert.d[0])
    return parse_rat(settings.DODGER_DELTA_FRACTION) * min(gaps)


class RandomAdversary(AStrategy):
    """One to three pours per turn of a random fraction j/grain of the available capacity."""

    name = "random"

    def __init__(self, seed: int, grain: int = 8) -> None:
        if grain < 1:
            raise ConfigError("grain must be positive")
        self.seed = seed
        self.grain = grain
        self.rng = np.random.default_rng(seed)

    def respond(self, view: ScaledView, event: StrategyEvent) -> Response:
        state = view.state
        candidates = set()
        for node in weighted_nodes(state):
            if node != ROOT:
                candidates.add(node)
            if len(node) < state.height:
                candidates.update(children(node))
        if not candidates:
            return Response()
        ordered = sorted(candidates, key=lambda x: (len(x), x))
        plan = FlowPlan(state)
        for _ in range(int(self.rng.integers(1, 4))):
            node = ordered[int(self.rng.integers(len(ordered)))]
            j = int(self.rng.integers(1, self.grain + 1))
            plan.raise_by(node, plan.capacity(node) * Fraction(j, self.grain))
        return Response(updates=plan.updates())


class UniformOnce(AStrategy):
    """Opening move a(x) = a(Λ)·2^-|x| around every weighted node, then silence."""

    name = "uniform_once"

    def __init__(self) -> None:
        self.played = False

    def respond(self, view: ScaledView, event: StrategyEvent) -> Response:
        if self.played:
            return Response()
        self.played = True
        state = view.state
        nodes = set()
        for node in weighted_nodes(state):
            for p in prefixes(node)[1:]:
                nodes.update((p, sibling(p)))
        root_flow = state.config.root_flow
        updates = {}
        for node in sorted(nodes, key=lambda x: (len(x), x)):
            value = root_flow / (1 << len(node))
            if value > state.flow(node):
                updates[node] = value
        return Response(updates=updates)


class Scripted(AStrategy):
    """Replay a recorded sequence of Adversary moves, then pass."""

    name = "scripted"

    def __init__(self, moves: Sequence[Dict[NodeId, Fraction]]) -> None:
        self.moves = list(moves)
        self.turn = 0

    def respond(self, view: ScaledView, event: StrategyEvent) -> Response:
        if self.turn >= len(self.moves):
            return Response()
        updates = dict(self.moves[self.turn])
        self.turn += 1
        return Response(updates=updates)


def greedy_all() -> GreedyAll:
    return GreedyAll()


def proportional_online() -> ProportionalOnline:
    return ProportionalOnline()


def threshold_dodger(cert: StrategyCert, delta: Optional[Rational] = None) -> ThresholdDodger:
    return ThresholdDodger(cert, delta)


def random_adversary(seed: int, grain: int = 8) -> RandomAdversary:
    return RandomAdversary(seed, grain)


def uniform_once() -> UniformOnce:
    return UniformOnce()


def silent() -> Silent:
    return Silent()


def scripted(trace: Iterable[Union[MoveDelta, TraceEvent]]) -> Scripted:
    """Adversary moves taken from a delta list or from the A events of a recorded trace."""
    moves: List[Dict[NodeId, Fraction]] = []
    for item in trace:
        if isinstance(item, MoveDelta):
            if item.player is Player.A:
                moves.append(dict(item.updates))
        elif item.player == "A" and item.status == "ok":
            moves.append({u.node: parse_rat(u.value) for u in item.updates})
    return Scripted(moves)
