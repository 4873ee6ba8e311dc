"""
Strategy interface shared by both players.

The harness delivers one event per turn and expects one `Response`: a batch of absolute values for
global nodes, optionally a claimed leaf, a resignation flag, and the tree height the move needs.
Mathematician strategies compose: a parent hands each child a sub-view and merges the child's
updates into its own batch.
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Mapping, Optional, Tuple, Union

from flowgame.game.rationals import ExtRat
from flowgame.game.state import MoveDelta, Player, max_ratio_path
from flowgame.game.tree import NodeId
from flowgame.game.view import ScaledView


@dataclass(frozen=True)
class OpponentMoved:
    delta: MoveDelta


@dataclass(frozen=True)
class YourTurn:
    pass


StrategyEvent = Union[OpponentMoved, YourTurn]


@dataclass
class Response:
    updates: Dict[NodeId, Fraction] = field(default_factory=dict)
    claim: Optional[NodeId] = None
    resign: bool = False
    height: Optional[int] = None

    def merge(self, other: "Response") -> None:
        """Fold a child's response into this one; later values for a node win."""
        self.updates.update(other.updates)
        if other.height is not None:
            self.height = other.height if self.height is None else max(self.height, other.height)
        self.resign = self.resign or other.resign

    def to_delta(self, player: Player) -> MoveDelta:
        return MoveDelta(player=player, updates=tuple(self.updates.items()))


class Strategy(ABC):
    """Stateful responder owned by a single match."""

    player: Player
    name: str = "strategy"

    @abstractmethod
    def respond(self, view: ScaledView, event: StrategyEvent) -> Response:
        """Return this turn's move; an empty `updates` map is a pass"""
        pass


class MStrategy(Strategy):
    player = Player.M

    def __init__(self) -> None:
        self.claim: Optional[NodeId] = None


class AStrategy(Strategy):
    player = Player.A


def hypothetical_best(view: ScaledView, updates: Mapping[NodeId, Fraction]) -> Tuple[NodeId, ExtRat]:
    """Best in-view leaf as if `updates` had already been applied to the weights."""
    cut = len(view.root)
    weights = {x[cut:]: w for x, w in view.state.m.items() if x.startswith(view.root)}
    for node, value in updates.items():
        if node.startswith(view.root):
            weights[node[cut:]] = value
    leaf, total = max_ratio_path(weights, lambda x: view.state.flow(view.root + x), view.visible_height)
    return view.root + leaf, total
