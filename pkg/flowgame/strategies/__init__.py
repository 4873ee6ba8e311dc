"""
Mathematician strategies, the Adversary suite and the grid solver.
"""

from flowgame.strategies.adversaries import (
    FlowPlan,
    greedy_all,
    pour,
    proportional_online,
    random_adversary,
    scripted,
    silent,
    threshold_dodger,
    uniform_once,
)
from flowgame.strategies.base import AStrategy, MStrategy, OpponentMoved, Response, Strategy, StrategyEvent, YourTurn
from flowgame.strategies.layered import LayeredDriver, layered_driver
from flowgame.strategies.mathematician import (
    one_shot_strategy,
    recursive_strategy,
    scaled,
    strategy_for_cert,
    toy_policy,
    toy_strategy,
    trivial_strategy,
)
from flowgame.strategies.registry import StrategyRegistry, get_a_strategy, get_m_strategy
from flowgame.strategies.solver import GridSolver, SolveResult, grid_solver, toy_guarantee

__all__ = [
    "FlowPlan",
    "greedy_all",
    "pour",
    "proportional_online",
    "random_adversary",
    "scripted",
    "silent",
    "threshold_dodger",
    "uniform_once",
    "AStrategy",
    "MStrategy",
    "OpponentMoved",
    "Response",
    "Strategy",
    "StrategyEvent",
    "YourTurn",
    "LayeredDriver",
    "layered_driver",
    "one_shot_strategy",
    "recursive_strategy",
    "scaled",
    "strategy_for_cert",
    "toy_policy",
    "toy_strategy",
    "trivial_strategy",
    "StrategyRegistry",
    "get_a_strategy",
    "get_m_strategy",
    "GridSolver",
    "SolveResult",
    "grid_solver",
    "toy_guarantee",
]
