"""
Discrete semimeasures on a finite binary tree and the proportional-split flow they induce.

Splitting the unit flow at every node in proportion to the semimeasure mass of the two subtrees
keeps Σ_{x ⊑ w} m(x)/a(x) ≤ 1 along every path; `max_path_ratio_sum` checks that bound exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Mapping, Optional, Tuple

import numpy as np

from flowgame.errors import ConfigError
from flowgame.game.rationals import ONE, ZERO, ExtRat, Rational, as_fraction, ratio
from flowgame.game.state import max_ratio_path
from flowgame.game.tree import ROOT, NodeId, check_node, children, prefixes

# Denominator of the total mass drawn for random semimeasures.
_MASS_GRAIN = 1000


@dataclass(frozen=True)
class DiscreteSemimeasure:
    height: int
    weights: Dict[NodeId, Fraction] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.height < 0:
            raise ConfigError("height must be non-negative")
        clean: Dict[NodeId, Fraction] = {}
        for node, value in self.weights.items():
            check_node(node, self.height)
            frac = as_fraction(value)
            if frac < 0:
                raise ConfigError(f"negative weight at {node or 'Λ'}")
            if frac:
                clean[node] = clean.get(node, ZERO) + frac
        total = sum(clean.values(), ZERO)
        if total > 1:
            raise ConfigError(f"not a semimeasure: total mass {total} > 1")
        object.__setattr__(self, "weights", clean)

    @classmethod
    def of(cls, height: int, weights: Mapping[NodeId, Rational]) -> "DiscreteSemimeasure":
        return cls(height=height, weights={node: as_fraction(value) for node, value in weights.items()})

    @property
    def total(self) -> Fraction:
        return sum(self.weights.values(), ZERO)

    def weight(self, node: NodeId) -> Fraction:
        return self.weights.get(node, ZERO)


def _prefix_masses(m: DiscreteSemimeasure) -> Dict[NodeId, Fraction]:
    masses: Dict[NodeId, Fraction] = {}
    for node, weight in m.weights.items():
        for p in prefixes(node):
            masses[p] = masses.get(p, ZERO) + weight
    return masses


def subtree_mass(m: DiscreteSemimeasure, z: NodeId) -> Fraction:
    """M_z: total weight of z and everything below it."""
    return sum((w for node, w in m.weights.items() if node.startswith(z)), ZERO)


@dataclass(frozen=True)
class TreeMeasure:
    """Flow on a height-bounded tree stored sparsely.

    Nodes without an explicit value receive an equal share of their deepest explicit ancestor's
    value, halved once per level.
    """

    height: int
    explicit: Dict[NodeId, Fraction]

    def value(self, node: NodeId) -> Fraction:
        check_node(node, self.height)
        for cut in range(len(node), -1, -1):
            anchor = node[:cut]
            if anchor in self.explicit:
                return self.explicit[anchor] / (1 << (len(node) - cut))
        raise ConfigError("tree measure has no root value")

    def is_additive(self) -> bool:
        for node in self.explicit:
            if len(node) >= self.height:
                continue
            left, right = children(node)
            if self.value(node) != self.value(left) + self.value(right):
                return False
        return True

    def flow_updates(self) -> List[Tuple[NodeId, Fraction]]:
        """Explicit non-root values, shallowest first, as adversary updates."""
        return [(node, self.explicit[node]) for node in sorted(self.explicit, key=lambda x: (len(x), x)) if node != ROOT]


def proportional_split(m: DiscreteSemimeasure, height: Optional[int] = None, root_value: Rational = ONE) -> TreeMeasure:
    height = m.height if height is None else height
    if height < m.height:
        raise ConfigError(f"height {height} is below the semimeasure's height {m.height}")
    masses = _prefix_masses(m)
    explicit: Dict[NodeId, Fraction] = {ROOT: as_fraction(root_value)}
    # top-down over the closure of the support; children of closure nodes get explicit values too
    for node in sorted(masses, key=lambda x: (len(x), x)):
        if len(node) >= height:
            continue
        left, right = children(node)
        mass_left = masses.get(left, ZERO)
        mass_right = masses.get(right, ZERO)
        here = explicit[node]
        if mass_left + mass_right == 0:
            explicit[left] = explicit[right] = here / 2
        else:
            explicit[left] = here * mass_left / (mass_left + mass_right)
            explicit[right] = here * mass_right / (mass_left + mass_right)
    return TreeMeasure(height=height, explicit=explicit)


def max_path_ratio(m: DiscreteSemimeasure, a: TreeMeasure) -> Tuple[NodeId, ExtRat]:
    return max_ratio_path(m.weights, a.value, a.height)


def max_path_ratio_sum(m: DiscreteSemimeasure, a: TreeMeasure) -> ExtRat:
    _, total = max_path_ratio(m, a)
    return total


def proportion_identity_holds(m: DiscreteSemimeasure, a: TreeMeasure) -> bool:
    """M_{xb}/a(xb) = (M_{x0}+M_{x1})/a(x) at every node whose children carry mass."""
    masses = _prefix_masses(m)
    for node in masses:
        if len(node) >= a.height:
            continue
        pair = children(node)
        below = sum((masses.get(c, ZERO) for c in pair), ZERO)
        if below == 0:
            continue
        expected = ratio(below, a.value(node))
        for c in pair:
            mass = masses.get(c, ZERO)
            if mass and ratio(mass, a.value(c)) != expected:
                return False
    return True


def _node_at(index: int) -> NodeId:
    # breadth-first numbering: 0 is Λ, 1 and 2 its children, ...
    j = index + 1
    level = j.bit_length() - 1
    return format(j - (1 << level), f"0{level}b") if level else ROOT


def random_semimeasure(rng: np.random.Generator, height: int, density: Optional[float] = None) -> DiscreteSemimeasure:
    """Exact random semimeasure: random support, integer shares of a random total mass ≤ 1."""
    n_nodes = (1 << (height + 1)) - 1
    if density is None:
        density = float(rng.uniform(0.0, 0.5))
    size = int(min(n_nodes, max(1, round(density * n_nodes))))
    support = rng.choice(n_nodes, size=size, replace=False)
    shares = rng.integers(1, _MASS_GRAIN, size=size)
    total = Fraction(int(rng.integers(1, _MASS_GRAIN + 1)), _MASS_GRAIN)
    denom = int(shares.sum())
    weights = {_node_at(int(idx)): total * int(share) / denom for idx, share in zip(support, shares)}
    return DiscreteSemimeasure(height=height, weights=weights)


def iter_random_semimeasures(seed: int, count: int, height: int) -> Iterator[DiscreteSemimeasure]:
    rng = np.random.default_rng(seed)
    for _ in range(count):
        yield random_semimeasure(rng, int(rng.integers(0, height + 1)))
