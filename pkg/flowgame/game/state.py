"""
Game state and referee for the weight/flow game.

Mathematician (M) places weights m(x) under a total budget; Adversary (A) places flows a(x)
with a(Λ) fixed and a(x) ≥ a(x0) + a(x1) at every internal node. Both only ever increase their
values. M wins a finite game once some leaf w has Σ_{x ⊑ w} m(x)/a(x) ≥ target.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from flowgame.errors import (
    BudgetExceeded,
    ConfigError,
    DecreaseRejected,
    FlowViolation,
    OutOfTree,
    RootFlowChanged,
)
from flowgame.game.rationals import ZERO, ExtRat, Rational, as_fraction, ratio
from flowgame.game.tree import ROOT, NodeId, check_node, children, leftmost_leaf, parent, prefixes


class Player(str, Enum):
    M = "M"
    A = "A"


@dataclass(frozen=True)
class GameConfig:
    height: int
    root_flow: Fraction
    budget: Fraction
    target: Fraction

    def __post_init__(self) -> None:
        for name in ("root_flow", "budget", "target"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if not isinstance(self.height, int) or self.height < 0:
            raise ConfigError(f"height must be a non-negative integer, got {self.height!r}")
        if self.root_flow <= 0:
            raise ConfigError("root_flow must be positive")
        if self.budget <= 0:
            raise ConfigError("budget must be positive")
        if self.target <= 0:
            raise ConfigError("target must be positive")

    @classmethod
    def unit(cls, height: int, target: Rational) -> "GameConfig":
        return cls(height=height, root_flow=Fraction(1), budget=Fraction(1), target=as_fraction(target))


Update = Tuple[NodeId, Fraction]


@dataclass(frozen=True)
class MoveDelta:
    player: Player
    updates: Tuple[Update, ...] = ()

    @classmethod
    def of(cls, player: Player, updates: Union[Mapping[NodeId, Rational], Iterable[Tuple[NodeId, Rational]]]) -> "MoveDelta":
        items = updates.items() if isinstance(updates, Mapping) else updates
        return cls(player=player, updates=tuple((node, as_fraction(value)) for node, value in items))

    @property
    def is_pass(self) -> bool:
        return not self.updates


# ---------------------------------------------------------------------------
# Verdicts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MWins:
    leaf: NodeId
    reason: str = "claim stands"
    kind: str = field(default="MWins", init=False)


@dataclass(frozen=True)
class AWins:
    reason: str
    kind: str = field(default="AWins", init=False)


@dataclass(frozen=True)
class Undecided:
    reason: str = "round cap reached"
    kind: str = field(default="Undecided", init=False)


Verdict = Union[MWins, AWins, Undecided]


# ---------------------------------------------------------------------------
# State
# ---------------------------------------------------------------------------


@dataclass
class GameState:
    config: GameConfig
    m: Dict[NodeId, Fraction] = field(default_factory=dict)
    a: Dict[NodeId, Fraction] = field(default_factory=dict)
    m_total: Fraction = ZERO
    move_count: Dict[Player, int] = field(default_factory=lambda: {Player.M: 0, Player.A: 0})

    def weight(self, node: NodeId) -> Fraction:
        return self.m.get(node, ZERO)

    def flow(self, node: NodeId) -> Fraction:
        if node == ROOT:
            return self.config.root_flow
        return self.a.get(node, ZERO)

    def copy(self) -> "GameState":
        return GameState(
            config=self.config,
            m=dict(self.m),
            a=dict(self.a),
            m_total=self.m_total,
            move_count=dict(self.move_count),
        )

    @property
    def height(self) -> int:
        return self.config.height


def make_state(config: GameConfig) -> GameState:
    return GameState(config=config)


def grow_height(state: GameState, height: int) -> GameState:
    """Same weights on a taller tree; former leaves become internal nodes with empty subtrees."""
    if height < state.height:
        raise ConfigError(f"cannot shrink tree height from {state.height} to {height}")
    grown = state.copy()
    grown.config = replace(state.config, height=height)
    return grown


def _check_flow_at(state: GameState, node: NodeId) -> None:
    if len(node) >= state.height:
        return
    left, right = children(node)
    if state.flow(node) < state.flow(left) + state.flow(right):
        raise FlowViolation(
            node,
            f"a(x)={state.flow(node)} < a(x0)+a(x1)={state.flow(left) + state.flow(right)}",
        )


def apply_move(state: GameState, delta: MoveDelta) -> GameState:
    """Return the post-move state; the input state is never modified.

    Updates are applied in order and the whole resulting position is re-validated: budget for M,
    the flow constraint at every touched node and at its parent for A.
    """
    new = state.copy()
    height = state.height
    touched: List[NodeId] = []
    for node, value in delta.updates:
        check_node(node, height)
        value = as_fraction(value)
        if delta.player is Player.M:
            current = new.weight(node)
        else:
            current = new.flow(node)
            if node == ROOT and value != current:
                raise RootFlowChanged(node, f"a(Λ) is fixed at {current}")
        if value < current:
            raise DecreaseRejected(node, f"{value} < current {current}")
        if value == current:
            continue
        if delta.player is Player.M:
            new.m[node] = value
            new.m_total += value - current
        else:
            new.a[node] = value
        touched.append(node)

    if delta.player is Player.M:
        if new.m_total > state.config.budget:
            raise BudgetExceeded(
                touched[-1] if touched else None,
                f"Σm={new.m_total} > budget {state.config.budget}",
            )
    else:
        for node in touched:
            _check_flow_at(new, node)
            if node != ROOT:
                _check_flow_at(new, parent(node))

    if not delta.is_pass:
        new.move_count[delta.player] = new.move_count.get(delta.player, 0) + 1
    return new


# ---------------------------------------------------------------------------
# Path sums
# ---------------------------------------------------------------------------


def weight_depth(weights: Mapping[NodeId, Fraction]) -> int:
    """Depth of the deepest positively weighted node, 0 for an empty map."""
    return max((len(x) for x, w in weights.items() if w > 0), default=0)


def max_ratio_path(
    weights: Mapping[NodeId, Fraction],
    flow_of: Callable[[NodeId], Fraction],
    height: int,
) -> Tuple[NodeId, ExtRat]:
    """Best path Σ_{x ⊑ node} weights(x)/flow(x), leftmost among equals.

    Only weighted nodes contribute, so the search visits those (plus Λ) instead of the whole tree.
    Nodes sharing a prefix are contiguous in lexicographic order, so each node's descendants are the
    block that follows it. The returned node is padded with zeros down to the deepest weighted node
    (never past `height`) and stands for its leftmost leaf.
    """
    nodes = sorted({x for x, w in weights.items() if w > 0} | {ROOT})
    depth = min(height, max(len(x) for x in nodes))
    best: Dict[NodeId, Tuple[ExtRat, NodeId]] = {}
    for idx in range(len(nodes) - 1, -1, -1):
        x = nodes[idx]
        value: ExtRat = ZERO
        leaf = leftmost_leaf(x, depth)
        j = idx + 1
        while j < len(nodes) and nodes[j].startswith(x):
            cand_value, cand_leaf = best[nodes[j]]
            if cand_value > value or (cand_value == value and cand_leaf < leaf):
                value, leaf = cand_value, cand_leaf
            j += 1
        best[x] = (ratio(weights.get(x, ZERO), flow_of(x)) + value, leaf)
    return best[ROOT][1], best[ROOT][0]


def pad_to_weights(state: GameState, node: NodeId) -> NodeId:
    """Zero-extend `node` down to the deepest weighted node; both name the same leftmost leaf."""
    return leftmost_leaf(node, max(len(node), weight_depth(state.m)))


def path_sum(state: GameState, leaf: NodeId) -> ExtRat:
    """Σ m/a along the path to the leftmost leaf below `leaf`; any node of the tree is accepted."""
    check_node(leaf, state.height)
    total: ExtRat = ZERO
    for x in prefixes(pad_to_weights(state, leaf)):
        weight = state.m.get(x)
        if weight:
            total = total + ratio(weight, state.flow(x))
    return total


def best_leaf(state: GameState) -> Tuple[NodeId, ExtRat]:
    return max_ratio_path(state.m, state.flow, state.height)


def is_winning_for_M(state: GameState) -> bool:
    _, total = best_leaf(state)
    return total >= state.config.target


def flow_slack(state: GameState, node: NodeId) -> Fraction:
    check_node(node, state.height)
    if len(node) == state.height:
        raise OutOfTree(node, "leaves have no outgoing flow")
    left, right = children(node)
    return state.flow(node) - state.flow(left) - state.flow(right)


def weighted_nodes(state: GameState) -> Sequence[NodeId]:
    """M-weighted nodes, shallowest first then left to right."""
    return sorted((x for x, w in state.m.items() if w > 0), key=lambda x: (len(x), x))


def claim_sum(state: GameState, claim: Optional[NodeId]) -> ExtRat:
    if claim is None:
        return ZERO
    return path_sum(state, claim)
