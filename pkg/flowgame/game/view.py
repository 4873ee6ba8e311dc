"""
Scaled subtree views.

A strategy written for the unit game (budget 1, root flow 1) plays inside any subtree through a
`ScaledView`: local addresses are relative to the view root, every recommended weight is multiplied
by the view's budget, and the Adversary's flows are read raw but compared against `assumed_flow`.
A guarantee of k in the unit game becomes an in-subtree sum of k·budget/assumed_flow while the real
flow at the view root stays at or below `assumed_flow`.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional, Tuple

from flowgame.errors import ConfigError, OutOfTree
from flowgame.game.rationals import ZERO, ExtRat, Rational, as_fraction, ratio
from flowgame.game.state import GameState, max_ratio_path, pad_to_weights
from flowgame.game.tree import ROOT, NodeId, check_node, is_node, prefixes


@dataclass(frozen=True)
class ScaledView:
    state: GameState
    root: NodeId
    assumed_flow: Fraction
    budget: Fraction
    # Subtree height; defaults to what the current tree leaves below the root.
    depth: Optional[int] = None

    @property
    def height(self) -> int:
        if self.depth is not None:
            return self.depth
        return max(self.state.height - len(self.root), 0)

    @property
    def visible_height(self) -> int:
        """Part of the subtree that exists in the current tree."""
        return max(min(self.height, self.state.height - len(self.root)), 0)

    def node(self, local: NodeId) -> NodeId:
        check_node(local, self.height)
        return self.root + local

    def weight(self, local: NodeId = ROOT) -> Fraction:
        return self.state.weight(self.node(local))

    def flow(self, local: NodeId = ROOT) -> Fraction:
        return self.state.flow(self.node(local))

    def flow_ratio(self, local: NodeId = ROOT) -> Fraction:
        """Flow at a local node in units of the assumed root flow."""
        return self.flow(local) / self.assumed_flow

    def place(self, local: NodeId, share: Rational) -> Tuple[NodeId, Fraction]:
        """Translate a unit-game recommendation into a global (node, absolute weight) update."""
        return self.node(local), as_fraction(share) * self.budget

    def subview(
        self,
        local: NodeId,
        budget_share: Rational,
        flow_share: Rational,
        depth: Optional[int] = None,
    ) -> "ScaledView":
        root = self.node(local)
        if depth is None and self.depth is not None:
            depth = self.depth - len(local)
        return ScaledView(
            state=self.state,
            root=root,
            assumed_flow=self.assumed_flow * as_fraction(flow_share),
            budget=self.budget * as_fraction(budget_share),
            depth=depth,
        )

    def with_state(self, state: GameState) -> "ScaledView":
        return replace(self, state=state)

    def target(self, k: Rational) -> Fraction:
        return as_fraction(k) * self.budget / self.assumed_flow

    def subtree_sum(self, leaf: NodeId) -> ExtRat:
        """Σ m/a from the view root (inclusive) down to the leftmost in-view leaf below a global node."""
        if not leaf.startswith(self.root):
            raise OutOfTree(leaf, f"outside the subtree rooted at {self.root or 'Λ'}")
        path = pad_to_weights(self.state, leaf)[: max(len(leaf), len(self.root) + self.height)]
        total: ExtRat = ZERO
        for x in prefixes(path)[len(self.root) :]:
            weight = self.state.m.get(x)
            if weight:
                total = total + ratio(weight, self.state.flow(x))
        return total

    def best_leaf(self) -> Tuple[NodeId, ExtRat]:
        """Best in-subtree leaf as a global address, leftmost among equals."""
        cut = len(self.root)
        local_weights = {x[cut:]: w for x, w in self.state.m.items() if x.startswith(self.root)}
        leaf, total = max_ratio_path(local_weights, lambda x: self.state.flow(self.root + x), self.visible_height)
        return self.root + leaf, total

    def is_winning(self, k: Rational) -> bool:
        _, total = self.best_leaf()
        return total >= self.target(k)


def scale_view(
    state: GameState,
    subtree_root: NodeId,
    assumed_flow: Rational,
    budget_share: Rational,
    depth: Optional[int] = None,
) -> ScaledView:
    if not is_node(subtree_root):
        raise OutOfTree(str(subtree_root), "not a bit string")
    if depth is None:
        check_node(subtree_root, state.height)
    flow = as_fraction(assumed_flow)
    if flow <= 0:
        raise ConfigError(f"assumed_flow must be positive, got {flow}")
    budget = as_fraction(budget_share)
    if budget < 0:
        raise ConfigError(f"budget_share must be non-negative, got {budget}")
    return ScaledView(state=state, root=subtree_root, assumed_flow=flow, budget=budget, depth=depth)


def identity_view(state: GameState) -> ScaledView:
    return ScaledView(
        state=state,
        root=ROOT,
        assumed_flow=state.config.root_flow,
        budget=state.config.budget,
    )
