from __future__ import annotations

import importlib
import inspect
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional

from flowgame.errors import ConfigError, StrategyNotFound
from flowgame.strategies.base import AStrategy, MStrategy, Strategy


@dataclass(frozen=True)
class StrategySpec:
    module: str
    factory_name: str
    factory: Optional[Callable[..., Strategy]] = None


# Default registry maps. Keys are the aliases accepted on the command line.
M_STRATEGIES: Dict[str, StrategySpec] = {
    "trivial": StrategySpec(module="flowgame.strategies.mathematician", factory_name="trivial_strategy"),
    "toy": StrategySpec(module="flowgame.strategies.mathematician", factory_name="toy_strategy"),
    "recursive": StrategySpec(module="flowgame.strategies.mathematician", factory_name="recursive_strategy"),
    "one_shot": StrategySpec(module="flowgame.strategies.mathematician", factory_name="one_shot_strategy"),
    "layered": StrategySpec(module="flowgame.strategies.layered", factory_name="layered_driver"),
    # monotone variants
    "monotone": StrategySpec(module="flowgame.monotone.strategy", factory_name="monotone_recursive_strategy"),
    "monotone_layered": StrategySpec(module="flowgame.monotone.strategy", factory_name="monotone_layered_driver"),
}

A_STRATEGIES: Dict[str, StrategySpec] = {
    "greedy_all": StrategySpec(module="flowgame.strategies.adversaries", factory_name="greedy_all"),
    "proportional_online": StrategySpec(module="flowgame.strategies.adversaries", factory_name="proportional_online"),
    "threshold_dodger": StrategySpec(module="flowgame.strategies.adversaries", factory_name="threshold_dodger"),
    "random": StrategySpec(module="flowgame.strategies.adversaries", factory_name="random_adversary"),
    "uniform_once": StrategySpec(module="flowgame.strategies.adversaries", factory_name="uniform_once"),
    "silent": StrategySpec(module="flowgame.strategies.adversaries", factory_name="silent"),
    "scripted": StrategySpec(module="flowgame.strategies.adversaries", factory_name="scripted"),
}


class StrategyRegistry:
    def __init__(self, base_registry: Dict[str, StrategySpec]) -> None:
        self._registry: Dict[str, StrategySpec] = dict(base_registry)
        # Track resolutions for tests
        self._usage_counters: Dict[str, int] = {}

    def register(self, alias: str, module: str, factory_name: str, factory: Optional[Callable[..., Strategy]] = None) -> None:
        self._registry[alias] = StrategySpec(module=module, factory_name=factory_name, factory=factory)

    def aliases(self) -> List[str]:
        return sorted(self._registry)

    def _factory(self, spec: StrategySpec) -> Callable[..., Strategy]:
        if spec.factory is not None:
            return spec.factory
        module = importlib.import_module(spec.module)
        return getattr(module, spec.factory_name)

    def get(self, alias: str, **options: Any) -> Strategy:
        """
        Build a fresh strategy for `alias`.

        Options the factory does not take are ignored, as are options set to None; a required
        parameter that is still missing is a configuration error.
        """
        spec = self._registry.get(alias)
        if spec is None:
            raise StrategyNotFound(f"unknown strategy {alias!r}; known: {', '.join(self.aliases())}")
        factory = self._factory(spec)
        params = inspect.signature(factory).parameters
        kwargs = {name: value for name, value in options.items() if name in params and value is not None}
        missing = [
            name
            for name, p in params.items()
            if p.default is inspect.Parameter.empty and p.kind is not p.VAR_KEYWORD and name not in kwargs
        ]
        if missing:
            raise ConfigError(f"strategy {alias!r} needs {', '.join(missing)}")
        self._usage_counters[alias] = self._usage_counters.get(alias, 0) + 1
        return factory(**kwargs)

    def get_usage_stats(self) -> Dict[str, int]:
        return dict(self._usage_counters)


m_registry = StrategyRegistry(M_STRATEGIES)
a_registry = StrategyRegistry(A_STRATEGIES)


def get_m_strategy(alias: str, **options: Any) -> MStrategy:
    strategy = m_registry.get(alias, **options)
    assert isinstance(strategy, MStrategy)
    return strategy


def get_a_strategy(alias: str, **options: Any) -> AStrategy:
    strategy = a_registry.get(alias, **options)
    assert isinstance(strategy, AStrategy)
    return strategy
