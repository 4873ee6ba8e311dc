"""
Referee for the weight/flow game on a finite binary tree.
"""

from flowgame.game.rationals import INF, ONE, ZERO, ExtRat, Rational, as_fraction, format_rat, parse_ext, parse_rat, ratio
from flowgame.game.state import (
    AWins,
    GameConfig,
    GameState,
    MoveDelta,
    MWins,
    Player,
    Undecided,
    Verdict,
    apply_move,
    best_leaf,
    flow_slack,
    grow_height,
    is_winning_for_M,
    make_state,
    max_ratio_path,
    pad_to_weights,
    path_sum,
    weight_depth,
    weighted_nodes,
)
from flowgame.game.tree import ROOT, NodeId, children, leftmost_leaf, parent, prefixes, sibling
from flowgame.game.view import ScaledView, identity_view, scale_view

__all__ = [
    "INF",
    "ONE",
    "ZERO",
    "ExtRat",
    "Rational",
    "as_fraction",
    "format_rat",
    "parse_ext",
    "parse_rat",
    "ratio",
    "AWins",
    "GameConfig",
    "GameState",
    "MoveDelta",
    "MWins",
    "Player",
    "Undecided",
    "Verdict",
    "apply_move",
    "best_leaf",
    "flow_slack",
    "grow_height",
    "is_winning_for_M",
    "make_state",
    "max_ratio_path",
    "pad_to_weights",
    "path_sum",
    "weight_depth",
    "weighted_nodes",
    "ROOT",
    "NodeId",
    "children",
    "leftmost_leaf",
    "parent",
    "prefixes",
    "sibling",
    "ScaledView",
    "identity_view",
    "scale_view",
]
