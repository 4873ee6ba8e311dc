"""
Marked branches and subgame root placement.

A branch is an infinite 0/1 sequence with finitely many ones, kept as the set of 1-positions.
Placement pads new subgame roots with ones so every later branch covers every earlier one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, Iterable, List, Optional

from flowgame.errors import ConfigError, MonotonicityViolation
from flowgame.game.tree import NodeId


@dataclass(frozen=True)
class MarkedBranch:
    ones: FrozenSet[int] = frozenset()

    @classmethod
    def from_node(cls, node: NodeId) -> "MarkedBranch":
        return cls(frozenset(i for i, bit in enumerate(node) if bit == "1"))

    @classmethod
    def of(cls, positions: Iterable[int]) -> "MarkedBranch":
        ones = frozenset(positions)
        if any(p < 0 for p in ones):
            raise ConfigError("branch positions must be non-negative")
        return cls(ones)

    def prefix(self, length: int) -> NodeId:
        return "".join("1" if i in self.ones else "0" for i in range(length))

    def union(self, other: "MarkedBranch") -> "MarkedBranch":
        return MarkedBranch(self.ones | other.ones)


def dominates(b1: MarkedBranch, b2: MarkedBranch) -> bool:
    """True when b2 ≥ b1 coordinate-wise, realised as b1's ones being a subset of b2's."""
    return b1.ones <= b2.ones


def watermark(branch: MarkedBranch) -> int:
    return max(branch.ones, default=-1)


class RootKind(str, Enum):
    LEFT = "left"
    THREAT = "threat"
    LAYER_RESTART = "layer_restart"


def place_subgame_root(
    kind: RootKind,
    current: MarkedBranch,
    previous: Optional[int] = None,
    anchor: Optional[NodeId] = None,
) -> NodeId:
    """Root for the next subgame, relative to the current game's root.

    left: 0·1^j·0 with j = max(W, previous + 1), `previous` being the spine length of the last left
    root. threat: 1^(W+2). layer_restart: `anchor` extended by ones through depth W, at least one of
    them, and to a depth of at least `previous` when given.
    """
    w = watermark(current)
    if kind is RootKind.LEFT:
        ones = max(w, (previous if previous is not None else -1) + 1)
        return "0" + "1" * ones + "0"
    if kind is RootKind.THREAT:
        return "1" * (w + 2)
    if kind is RootKind.LAYER_RESTART:
        if anchor is None:
            raise ConfigError("a layer restart needs the anchor node")
        length = max(w + 1, len(anchor) + 1, previous or 0)
        return anchor + "1" * (length - len(anchor))
    raise ConfigError(f"unknown root kind {kind!r}")


@dataclass
class MarkRecord:
    """Marked-leaf history of one finite game; every change must dominate the last."""

    history: List[NodeId] = field(default_factory=list)

    @property
    def marked(self) -> Optional[NodeId]:
        return self.history[-1] if self.history else None

    @property
    def changes(self) -> int:
        return max(len(self.history) - 1, 0)

    def mark(self, node: NodeId) -> None:
        if self.history and self.history[-1] == node:
            return
        if self.history and not dominates(MarkedBranch.from_node(self.history[-1]), MarkedBranch.from_node(node)):
            raise MonotonicityViolation(f"marked leaf {node} does not dominate {self.history[-1]}")
        self.history.append(node)

    def branch(self) -> MarkedBranch:
        return MarkedBranch.from_node(self.marked or "")


def is_dominance_chain(nodes: Iterable[NodeId]) -> bool:
    branches = [MarkedBranch.from_node(x) for x in nodes]
    return all(dominates(a, b) for a, b in zip(branches, branches[1:]))
