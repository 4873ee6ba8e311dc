"""
Match runner.

The `Referee` owns the authoritative state and the end-of-game bookkeeping; `run_match` drives two
strategies through it and `verify_trace` drives the recorded moves through a fresh one, so live
play and replay share every rule.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple, Union

import structlog

from flowgame import metrics
from flowgame.errors import IllegalMoveError
from flowgame.game.rationals import format_rat
from flowgame.game.state import (
    AWins,
    GameConfig,
    MoveDelta,
    MWins,
    Player,
    Undecided,
    Verdict,
    apply_move,
    best_leaf,
    claim_sum,
    grow_height,
    is_winning_for_M,
    make_state,
    pad_to_weights,
)
from flowgame.game.tree import NodeId, is_node
from flowgame.game.view import identity_view
from flowgame.schemas import (
    TraceCaps,
    TraceConfig,
    TraceEvent,
    TraceFooter,
    TraceHeader,
    UpdateEntry,
    canonical_json,
)
from flowgame.settings import settings
from flowgame.strategies.base import AStrategy, MStrategy, OpponentMoved, Strategy, StrategyEvent, YourTurn

logger = structlog.get_logger(__name__)

Updates = Sequence[Tuple[NodeId, Fraction]]


@dataclass
class MatchTrace:
    header: TraceHeader
    events: List[TraceEvent]
    footer: TraceFooter

    def lines(self) -> List[str]:
        return [canonical_json(self.header), *(canonical_json(e) for e in self.events), canonical_json(self.footer)]

    def to_jsonl(self) -> str:
        return "\n".join(self.lines()) + "\n"

    def write(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.to_jsonl(), encoding="utf-8")


def _entries(updates: Updates) -> List[UpdateEntry]:
    # rejected moves keep their submitted nodes verbatim so replay hits the same error
    return [UpdateEntry(node=str(node), value=format_rat(value)) for node, value in updates]


class Referee:
    """Applies moves in turn order and decides the verdict.

    After an Adversary move that leaves M winning, a counter of non-restoring turns goes up; any
    restoring move resets it. `grace` such turns in a row end the match for M.
    """

    def __init__(self, config: GameConfig, grace: int, max_rounds: int) -> None:
        self.state = make_state(config)
        self.grace = grace
        self.max_rounds = max_rounds
        self.events: List[TraceEvent] = []
        self.claim: Optional[NodeId] = None
        self.idle = 0
        self.rounds = 0
        self.verdict: Optional[Verdict] = None

    @property
    def to_move(self) -> Player:
        return Player.M if len(self.events) % 2 == 0 else Player.A

    def _normalize_claim(self, claim: Optional[NodeId]) -> Optional[NodeId]:
        if claim is None or not is_node(claim):
            return None
        return pad_to_weights(self.state, claim[: self.state.height])

    def _claim_stands(self) -> bool:
        return self.claim is not None and claim_sum(self.state, self.claim) >= self.state.config.target

    def _m_wins(self, reason: str) -> MWins:
        if self._claim_stands():
            assert self.claim is not None
            return MWins(leaf=self.claim, reason=reason)
        leaf, _ = best_leaf(self.state)
        return MWins(leaf=leaf, reason=reason)

    def _record(self, event: TraceEvent) -> TraceEvent:
        self.events.append(event)
        return event

    def move(
        self,
        player: Player,
        updates: Updates,
        height: Optional[int] = None,
        claim: Optional[NodeId] = None,
    ) -> TraceEvent:
        """Apply a move; an illegal one raises and leaves the referee untouched."""
        state = self.state
        grown: Optional[int] = None
        if height is not None and height > state.height:
            state = grow_height(state, height)
            grown = height
        new = apply_move(state, MoveDelta.of(player, updates))
        self.state = new
        winning = is_winning_for_M(new)
        if player is Player.M:
            self.rounds += 1
            self.claim = self._normalize_claim(claim)
            if not winning:
                self.verdict = AWins(reason="M-failed")
        else:
            self.idle = self.idle + 1 if winning else 0
            if self.idle >= self.grace:
                self.verdict = self._m_wins("A did not restore")
            elif self.rounds >= self.max_rounds:
                self.verdict = Undecided()
        return self._record(
            TraceEvent(
                index=len(self.events),
                player=player.value,
                updates=_entries(updates),
                height=grown,
                winning=winning,
                claim=self.claim if player is Player.M else None,
            )
        )

    def reject(
        self,
        player: Player,
        updates: Updates,
        error: IllegalMoveError,
        height: Optional[int] = None,
    ) -> TraceEvent:
        if player is Player.M:
            self.rounds += 1
        self.verdict = AWins(reason=f"M illegal: {error}") if player is Player.M else self._m_wins(f"A illegal: {error}")
        return self._record(
            TraceEvent(
                index=len(self.events),
                player=player.value,
                updates=_entries(updates),
                height=height if height is not None and height > self.state.height else None,
                winning=is_winning_for_M(self.state),
                status="illegal",
                error=type(error).__name__,
            )
        )

    def resign(self, player: Player, error: Optional[str] = None) -> TraceEvent:
        if player is Player.M:
            self.rounds += 1
        self.verdict = AWins(reason="M resigned") if player is Player.M else self._m_wins("A resigned")
        return self._record(
            TraceEvent(
                index=len(self.events),
                player=player.value,
                winning=is_winning_for_M(self.state),
                status="resigned",
                error=error,
            )
        )

    def footer(self) -> TraceFooter:
        verdict = self.verdict or Undecided()
        leaf, total = best_leaf(self.state)
        win_leaf = verdict.leaf if isinstance(verdict, MWins) else None
        return TraceFooter(
            verdict=verdict.kind,
            reason=verdict.reason,
            rounds=self.rounds,
            leaf=win_leaf,
            sum=format_rat(claim_sum(self.state, win_leaf)) if win_leaf is not None else None,
            best_leaf=leaf,
            best_sum=format_rat(total),
        )


Observer = Callable[[Referee, TraceEvent], None]


def trace_header(
    config: GameConfig,
    m_name: str,
    a_name: str,
    grace: int,
    max_rounds: int,
    seed: Optional[int] = None,
    cert_hash: Optional[str] = None,
) -> TraceHeader:
    return TraceHeader(
        config=TraceConfig(
            height=config.height,
            root_flow=format_rat(config.root_flow),
            budget=format_rat(config.budget),
            target=format_rat(config.target),
        ),
        m_strategy=m_name,
        a_strategy=a_name,
        seed=seed,
        cert_hash=cert_hash,
        caps=TraceCaps(rounds=max_rounds, grace=grace),
    )


def _take_turn(referee: Referee, strategy: Strategy, event: StrategyEvent) -> Optional[MoveDelta]:
    player = strategy.player
    try:
        response = strategy.respond(identity_view(referee.state), event)
    except Exception as exc:
        logger.warning("strategy_failed", player=player.value, strategy=strategy.name, error=str(exc), exc_info=True)
        referee.resign(player, error=type(exc).__name__)
        return None
    if response.resign:
        referee.resign(player)
        return None
    updates = list(response.updates.items())
    try:
        referee.move(player, updates, height=response.height, claim=response.claim)
    except IllegalMoveError as exc:
        metrics.record_illegal_move(player.value, type(exc).__name__)
        logger.warning("illegal_move", player=player.value, strategy=strategy.name, error=str(exc))
        referee.reject(player, updates, exc, height=response.height)
        return None
    return MoveDelta.of(player, updates)


def run_match(
    m: MStrategy,
    a: AStrategy,
    config: GameConfig,
    *,
    grace: Optional[int] = None,
    max_rounds: Optional[int] = None,
    seed: Optional[int] = None,
    cert_hash: Optional[str] = None,
    observer: Optional[Observer] = None,
) -> MatchTrace:
    grace = grace if grace is not None else settings.MATCH_GRACE
    max_rounds = max_rounds if max_rounds is not None else settings.MATCH_MAX_ROUNDS
    header = trace_header(config, m.name, a.name, grace, max_rounds, seed=seed, cert_hash=cert_hash)
    referee = Referee(config, grace=grace, max_rounds=max_rounds)

    m_event: StrategyEvent = YourTurn()
    a_event: StrategyEvent = YourTurn()
    while referee.verdict is None:
        strategy: Strategy = m if referee.to_move is Player.M else a
        delta = _take_turn(referee, strategy, m_event if strategy is m else a_event)
        if observer is not None:
            observer(referee, referee.events[-1])
        if delta is None:
            continue
        if strategy is m:
            a_event = OpponentMoved(delta)
        else:
            m_event = OpponentMoved(delta)

    footer = referee.footer()
    metrics.record_match(footer.verdict, footer.rounds)
    logger.info(
        "match_finished",
        m_strategy=m.name,
        a_strategy=a.name,
        verdict=footer.verdict,
        reason=footer.reason,
        rounds=footer.rounds,
        best_sum=footer.best_sum,
    )
    return MatchTrace(header=header, events=referee.events, footer=footer)
