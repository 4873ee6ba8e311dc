"""
Monotone play: branches that only gain ones, and the enumeration they induce.
"""

from flowgame.monotone.branch import (
    MarkedBranch,
    MarkRecord,
    RootKind,
    dominates,
    is_dominance_chain,
    place_subgame_root,
    watermark,
)
from flowgame.monotone.builder import CEBuild, ce_builder
from flowgame.monotone.strategy import (
    MonotoneLayeredDriver,
    MonotoneRecursiveStrategy,
    monotone_layered_driver,
    monotone_recursive_strategy,
    monotone_strategy_for_cert,
)

__all__ = [
    "MarkedBranch",
    "MarkRecord",
    "RootKind",
    "dominates",
    "is_dominance_chain",
    "place_subgame_root",
    "watermark",
    "CEBuild",
    "ce_builder",
    "MonotoneLayeredDriver",
    "MonotoneRecursiveStrategy",
    "monotone_layered_driver",
    "monotone_recursive_strategy",
    "monotone_strategy_for_cert",
]
