"""
Exhaustive grid solver for tiny games.

Both players are restricted to multiples of 1/q. Each move must leave the mover's winning
condition in place; a player with no such move loses. The search runs to a ply cap and memoizes
positions up to the child-swap symmetries of the tree. Running out of plies counts against M.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import structlog

from flowgame.errors import ConfigError, ResourceCapExceeded
from flowgame.game.rationals import Rational, as_fraction, format_rat
from flowgame.game.state import Player
from flowgame.game.tree import NodeId, iter_leaves, iter_nodes, prefixes
from flowgame.settings import settings
from flowgame.strategies.mathematician import toy_policy

logger = structlog.get_logger(__name__)

Config = Tuple[int, ...]
Move = Tuple[Player, Dict[NodeId, Fraction]]

TOY_REFERENCE = Fraction(17, 16)


@dataclass
class SolveResult:
    winner: Player
    pv: List[Move]
    positions: int


class GridSolver:
    def __init__(
        self,
        height: int,
        k: Rational,
        grain: int,
        plies: int,
        toy: bool = False,
    ) -> None:
        if height > settings.SOLVER_MAX_HEIGHT or grain > settings.SOLVER_MAX_GRAIN or plies > settings.SOLVER_MAX_PLIES:
            raise ResourceCapExceeded(
                f"height {height}, grain {grain}, plies {plies} exceed the solver caps "
                f"({settings.SOLVER_MAX_HEIGHT}, {settings.SOLVER_MAX_GRAIN}, {settings.SOLVER_MAX_PLIES})"
            )
        if height < 0 or grain < 1 or plies < 0:
            raise ConfigError("height, grain and plies must be non-negative and grain positive")
        self.k = as_fraction(k)
        if self.k <= 0:
            raise ConfigError("k must be positive")
        if toy and (height != 2 or grain % 4):
            raise ConfigError("the toy strategy plays on height 2 with a grain divisible by 4")
        self.height = height
        self.q = grain
        self.plies = plies
        self.toy = toy
        self.nodes: List[NodeId] = list(iter_nodes(height))
        self.index = {x: i for i, x in enumerate(self.nodes)}
        self.paths = [[self.index[p] for p in prefixes(leaf)] for leaf in iter_leaves(height)]
        self.internal = [(self.index[x], self.index[x + "0"], self.index[x + "1"]) for x in self.nodes if len(x) < height]
        self.symmetries = [] if toy else self._symmetries()
        self.positions = 0
        self._memo: Dict[Tuple[Player, Config, Config, int], bool] = {}

    # -- geometry ---------------------------------------------------------------

    def _symmetries(self) -> List[List[int]]:
        """Index maps for every combination of child swaps at internal nodes."""
        internal = [x for x in self.nodes if len(x) < self.height]
        maps = []
        for mask in range(1 << len(internal)):
            swapped = {x for bit, x in enumerate(internal) if mask >> bit & 1}
            image = []
            for x in self.nodes:
                y = "".join(("1" if c == "0" else "0") if x[:d] in swapped else c for d, c in enumerate(x))
                image.append(self.index[y])
            maps.append(image)
        return maps

    def _key(self, m: Config, a: Config) -> Tuple[Config, Config]:
        if not self.symmetries:
            return m, a
        best = None
        for image in self.symmetries:
            pm = [0] * len(m)
            pa = [0] * len(a)
            for i, j in enumerate(image):
                pm[j] = m[i]
                pa[j] = a[i]
            cand = (tuple(pm), tuple(pa))
            if best is None or cand < best:
                best = cand
        assert best is not None
        return best

    def winning(self, m: Config, a: Config) -> bool:
        for path in self.paths:
            total = Fraction(0)
            for i in path:
                if m[i]:
                    if a[i] == 0:
                        return True
                    total += Fraction(m[i], a[i])
            if total >= self.k:
                return True
        return False

    # -- move generation ----------------------------------------------------------

    def m_moves(self, m: Config) -> Iterator[Config]:
        spare = self.q - sum(m)

        def extend(i: int, left: int, acc: List[int]) -> Iterator[Config]:
            if i == len(m):
                yield tuple(acc)
                return
            for extra in range(left + 1):
                acc.append(m[i] + extra)
                yield from extend(i + 1, left - extra, acc)
                acc.pop()

        for cand in extend(0, spare, []):
            if cand != m:
                yield cand

    def a_moves(self, a: Config) -> Iterator[Config]:
        def extend(j: int, acc: List[int]) -> Iterator[Config]:
            if j == len(self.internal):
                yield tuple(acc)
                return
            x, c0, c1 = self.internal[j]
            for v0 in range(a[c0], acc[x] - a[c1] + 1):
                for v1 in range(a[c1], acc[x] - v0 + 1):
                    acc[c0], acc[c1] = v0, v1
                    yield from extend(j + 1, acc)
            acc[c0], acc[c1] = a[c0], a[c1]

        for cand in extend(0, list(a)):
            if cand != a:
                yield cand

    def toy_move(self, m: Config, a: Config) -> Optional[Config]:
        shares = toy_policy(
            lambda x: Fraction(m[self.index[x]], self.q),
            lambda x: Fraction(a[self.index[x]], self.q),
            self.k,
        )
        if not shares:
            return None
        new = list(m)
        for x, share in shares.items():
            new[self.index[x]] = int(share * self.q)
        return tuple(new)

    def _m_candidates(self, m: Config, a: Config) -> Iterator[Config]:
        if self.toy:
            move = self.toy_move(m, a)
            if move is not None and self.winning(move, a):
                yield move
            return
        for cand in self.m_moves(m):
            if self.winning(cand, a):
                yield cand

    def _a_candidates(self, m: Config, a: Config) -> Iterator[Config]:
        for cand in self.a_moves(a):
            if not self.winning(m, cand):
                yield cand

    # -- search ---------------------------------------------------------------------

    def m_wins(self, player: Player, m: Config, a: Config, plies: int) -> bool:
        """Whether M forces a win from this position with `player` to move."""
        if plies == 0:
            return False
        memo_key = (player, *self._key(m, a), plies)
        hit = self._memo.get(memo_key)
        if hit is not None:
            return hit
        self.positions += 1
        if player is Player.M:
            result = any(self.m_wins(Player.A, cand, a, plies - 1) for cand in self._m_candidates(m, a))
        else:
            result = all(self.m_wins(Player.M, m, cand, plies - 1) for cand in self._a_candidates(m, a))
        self._memo[memo_key] = result
        return result

    def start(self) -> Tuple[Config, Config]:
        a = [0] * len(self.nodes)
        a[0] = self.q
        return (0,) * len(self.nodes), tuple(a)

    def solve(self) -> SolveResult:
        m, a = self.start()
        result = self.m_wins(Player.M, m, a, self.plies)
        winner = Player.M if result else Player.A
        pv = self.principal_variation(m, a, winner)
        logger.info(
            "grid_solved",
            height=self.height,
            k=format_rat(self.k),
            grain=self.q,
            plies=self.plies,
            toy=self.toy,
            winner=winner.value,
            positions=self.positions,
        )
        return SolveResult(winner=winner, pv=pv, positions=self.positions)

    def principal_variation(self, m: Config, a: Config, winner: Player) -> List[Move]:
        """A line consistent with the solved outcome, re-derived from the memo."""
        line: List[Move] = []
        player = Player.M
        for plies in range(self.plies, 0, -1):
            if player is Player.M:
                options = list(self._m_candidates(m, a))
                pick = next((c for c in options if self.m_wins(Player.A, c, a, plies - 1) == (winner is Player.M)), None)
                if pick is None:
                    break
                line.append((player, self._diff(m, pick)))
                m = pick
            else:
                options = list(self._a_candidates(m, a))
                pick = next((c for c in options if self.m_wins(Player.M, m, c, plies - 1) == (winner is Player.M)), None)
                if pick is None:
                    break
                line.append((player, self._diff(a, pick)))
                a = pick
            player = Player.A if player is Player.M else Player.M
        return line

    def _diff(self, before: Config, after: Config) -> Dict[NodeId, Fraction]:
        return {self.nodes[i]: Fraction(v, self.q) for i, (u, v) in enumerate(zip(before, after)) if u != v}


def grid_solver(height: int, k: Rational, grain: int, plies: Optional[int] = None) -> SolveResult:
    return GridSolver(height, k, grain, plies if plies is not None else settings.SOLVER_MAX_PLIES).solve()


@dataclass
class ToyGuarantee:
    k_star: Optional[Fraction]
    lost_at: Optional[Fraction]
    reference: Fraction = TOY_REFERENCE
    results: Dict[str, str] = field(default_factory=dict)


def default_toy_candidates() -> List[Fraction]:
    return [1 + Fraction(j, 16) for j in range(9)]


def toy_guarantee(
    height: int = 2,
    grain: int = 8,
    plies: Optional[int] = None,
    candidates: Optional[Sequence[Rational]] = None,
) -> ToyGuarantee:
    """Largest candidate k for which the toy strategy beats every grid adversary.

    Candidates are tried in increasing order and the scan stops at the first loss.
    """
    ply_cap = plies if plies is not None else settings.SOLVER_MAX_PLIES
    ks = sorted(as_fraction(k) for k in (candidates if candidates is not None else default_toy_candidates()))
    report = ToyGuarantee(k_star=None, lost_at=None)
    for k in ks:
        result = GridSolver(height, k, grain, ply_cap, toy=True).solve()
        report.results[format_rat(k)] = result.winner.value
        if result.winner is Player.A:
            report.lost_at = k
            break
        report.k_star = k
    logger.info(
        "toy_guarantee",
        grain=grain,
        k_star=format_rat(report.k_star) if report.k_star is not None else None,
        lost_at=format_rat(report.lost_at) if report.lost_at is not None else None,
        reference=format_rat(report.reference),
    )
    return report
