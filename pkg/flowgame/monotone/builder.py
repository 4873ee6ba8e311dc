"""
Enumeration builder.

Runs the monotone layered driver against an adversary and reports every position that turns to 1
on the driver's branch. Positions are only ever added, so the stream enumerates the limit set.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Set, Union

import structlog

from flowgame.game.rationals import Rational, as_fraction, format_rat, parse_rat
from flowgame.game.state import GameConfig, Player
from flowgame.harness.match import MatchTrace, Referee, run_match
from flowgame.monotone.branch import MarkedBranch, dominates
from flowgame.monotone.strategy import MonotoneLayeredDriver
from flowgame.schemas import CEReport, EnumEvent, TraceEvent, canonical_json
from flowgame.settings import settings
from flowgame.strategies.base import AStrategy

logger = structlog.get_logger(__name__)


@dataclass
class CEBuild:
    report: CEReport
    trace: MatchTrace
    events: List[EnumEvent] = field(default_factory=list)

    def write_events(self, path: Union[str, Path]) -> None:
        Path(path).write_text("".join(canonical_json(e) + "\n" for e in self.events), encoding="utf-8")


def ce_builder(
    adversary: AStrategy,
    layers: int = 2,
    *,
    quota_exponents: Optional[Sequence[int]] = None,
    layer_sum: Optional[Rational] = None,
    round_cap: Optional[int] = None,
    grace: Optional[int] = None,
    on_enum: Optional[Callable[[EnumEvent], None]] = None,
) -> CEBuild:
    """Run the enumeration against `adversary`.

    Layer j (1-based) defaults to quota 2^-j. The match target is the sum of the per-layer targets,
    so M keeps a winning position only while every layer stands.
    """
    exponents = list(quota_exponents) if quota_exponents is not None else list(range(1, layers + 1))
    s = as_fraction(layer_sum) if layer_sum is not None else parse_rat(settings.LAYER_SUM)
    driver = MonotoneLayeredDriver(exponents, layer_sum=s)
    config = GameConfig(height=0, root_flow=Fraction(1), budget=Fraction(1), target=s * len(exponents))

    emitted: Set[int] = set()
    events: List[EnumEvent] = []
    previous = MarkedBranch()
    dominance_ok = True

    def observe(referee: Referee, event: TraceEvent) -> None:
        nonlocal previous, dominance_ok
        if event.player != Player.M.value or event.status != "ok":
            return
        branch = driver.branch()
        if not dominates(previous, branch):
            dominance_ok = False
            logger.warning("dominance_broken", round=referee.rounds, previous=sorted(previous.ones), current=sorted(branch.ones))
        previous = branch
        for position in sorted(branch.ones - emitted):
            emitted.add(position)
            enum_event = EnumEvent(round=referee.rounds, position=position)
            events.append(enum_event)
            if on_enum is not None:
                on_enum(enum_event)

    trace = run_match(driver, adversary, config, grace=grace, max_rounds=round_cap, observer=observe)

    sums = driver.layer_sums()
    failed = [e for e in trace.events if e.player == Player.M.value and e.status != "ok"]
    if failed:
        verdict = "Failed"
        reason: Optional[str] = trace.footer.reason + (f" ({failed[0].error})" if failed[0].error else "")
    else:
        verdict = "Settled" if trace.footer.verdict == "MWins" else "Undecided"
        reason = None if verdict == "Settled" else trace.footer.reason
    report = CEReport(
        verdict=verdict,
        reason=reason,
        rounds=trace.footer.rounds,
        branch=driver.claim or "",
        layer_sums=[format_rat(x) for x in sums],
        total_sum=format_rat(driver.partial_sum()),
        enumerated=sorted(emitted),
        dominance_ok=dominance_ok and emitted <= previous.ones,
    )
    logger.info(
        "ce_build_finished",
        verdict=report.verdict,
        reason=report.reason,
        rounds=report.rounds,
        enumerated=len(report.enumerated),
        restarts=driver.restarts,
        unstarted=driver.unstarted(),
    )
    return CEBuild(report=report, trace=trace, events=events)
