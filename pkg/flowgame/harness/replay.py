"""
Trace reading and deterministic replay.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import List, Union

import structlog
from pydantic import ValidationError

from flowgame.errors import ConfigError, IllegalMoveError, ReplayDivergence, TraceSchemaError
from flowgame.game.rationals import parse_rat
from flowgame.game.state import GameConfig, Player
from flowgame.harness.match import MatchTrace, Referee
from flowgame.schemas import TraceEvent, TraceFooter, TraceHeader, canonical_json

logger = structlog.get_logger(__name__)


@dataclass(frozen=True)
class ReplayReport:
    events: int
    verdict: str
    rounds: int
    best_sum: str


def parse_trace(text: str) -> MatchTrace:
    lines = [line for line in text.splitlines() if line.strip()]
    if len(lines) < 2:
        raise TraceSchemaError("a trace needs at least a header and a footer")
    try:
        header = TraceHeader.model_validate(json.loads(lines[0]))
        events = [TraceEvent.model_validate(json.loads(line)) for line in lines[1:-1]]
        footer = TraceFooter.model_validate(json.loads(lines[-1]))
    except (ValidationError, json.JSONDecodeError) as exc:
        raise TraceSchemaError(str(exc)) from exc
    return MatchTrace(header=header, events=events, footer=footer)


def read_trace(path: Union[str, Path]) -> MatchTrace:
    return parse_trace(Path(path).read_text(encoding="utf-8"))


def _config(header: TraceHeader) -> GameConfig:
    c = header.config
    try:
        return GameConfig(
            height=c.height,
            root_flow=parse_rat(c.root_flow),
            budget=parse_rat(c.budget),
            target=parse_rat(c.target),
        )
    except ConfigError as exc:
        raise TraceSchemaError(f"bad header config: {exc}") from exc


def verify_trace(trace: Union[MatchTrace, str, Path]) -> ReplayReport:
    """Replay every event through a fresh referee and compare flags, claims and the footer.

    Raises `ReplayDivergence` with the index of the first event that does not reproduce.
    """
    if not isinstance(trace, MatchTrace):
        trace = read_trace(trace)
    referee = Referee(_config(trace.header), grace=trace.header.caps.grace, max_rounds=trace.header.caps.rounds)
    for position, event in enumerate(trace.events):
        if referee.verdict is not None:
            raise ReplayDivergence(position, "event after the match was decided")
        if event.index != position:
            raise ReplayDivergence(position, f"index {event.index} out of order")
        player = Player(event.player)
        if player is not referee.to_move:
            raise ReplayDivergence(position, f"{player.value} moved out of turn")
        updates = [(u.node, parse_rat(u.value)) for u in event.updates]
        if event.status == "resigned":
            replayed = referee.resign(player, error=event.error)
        elif event.status == "illegal":
            try:
                referee.move(player, updates, height=event.height, claim=event.claim)
            except IllegalMoveError as exc:
                if event.error is not None and type(exc).__name__ != event.error:
                    raise ReplayDivergence(position, f"rejected as {type(exc).__name__}, trace says {event.error}") from exc
                replayed = referee.reject(player, updates, exc, height=event.height)
            else:
                raise ReplayDivergence(position, "move recorded as illegal is legal")
        else:
            try:
                replayed = referee.move(player, updates, height=event.height, claim=event.claim)
            except IllegalMoveError as exc:
                raise ReplayDivergence(position, f"{type(exc).__name__}: {exc}") from exc
        if canonical_json(replayed) != canonical_json(event):
            raise ReplayDivergence(position, _difference(replayed, event))
    if referee.verdict is None and trace.events:
        raise ReplayDivergence(len(trace.events), "trace ends before the match was decided")
    footer = referee.footer()
    if canonical_json(footer) != canonical_json(trace.footer):
        raise ReplayDivergence(len(trace.events), f"footer differs: replay gives {canonical_json(footer)}")
    logger.debug("trace_verified", events=len(trace.events), verdict=footer.verdict)
    return ReplayReport(events=len(trace.events), verdict=footer.verdict, rounds=footer.rounds, best_sum=footer.best_sum)


def _difference(replayed: TraceEvent, recorded: TraceEvent) -> str:
    ours = replayed.model_dump(mode="json")
    theirs = recorded.model_dump(mode="json")
    fields: List[str] = sorted(k for k in ours if ours[k] != theirs.get(k))
    return "mismatch in " + ", ".join(f"{k} (replay {ours[k]!r}, trace {theirs.get(k)!r})" for k in fields)
