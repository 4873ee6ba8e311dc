from __future__ import annotations

from typing import Optional

from prometheus_client import CollectorRegistry, Counter, Histogram, generate_latest

from .settings import settings

# Registry (private so repeated imports in tests never collide with the default one)
_registry: Optional[CollectorRegistry] = None

# Metrics (initialized lazily against the active registry)
MATCHES_TOTAL: Optional[Counter] = None
MATCH_ROUNDS: Optional[Histogram] = None
CERTS_BUILT_TOTAL: Optional[Counter] = None
ILLEGAL_MOVES_TOTAL: Optional[Counter] = None


def get_registry() -> CollectorRegistry:
    global _registry
    if _registry is None:
        _registry = CollectorRegistry()
    return _registry


def _init_metrics() -> None:
    global MATCHES_TOTAL, MATCH_ROUNDS, CERTS_BUILT_TOTAL, ILLEGAL_MOVES_TOTAL

    reg = get_registry()

    if MATCHES_TOTAL is None:
        MATCHES_TOTAL = Counter(
            "flowgame_matches_total",
            "Finished matches by verdict",
            ["verdict"],
            registry=reg,
        )
    if MATCH_ROUNDS is None:
        MATCH_ROUNDS = Histogram(
            "flowgame_match_rounds",
            "Rounds played per match",
            buckets=(1, 2, 3, 5, 10, 25, 50, 100, 250, 1000, 10000),
            registry=reg,
        )
    if CERTS_BUILT_TOTAL is None:
        CERTS_BUILT_TOTAL = Counter(
            "flowgame_certs_built_total",
            "Strategy certificates constructed",
            registry=reg,
        )
    if ILLEGAL_MOVES_TOTAL is None:
        ILLEGAL_MOVES_TOTAL = Counter(
            "flowgame_illegal_moves_total",
            "Moves rejected by the referee",
            ["player", "error"],
            registry=reg,
        )


def record_match(verdict: str, rounds: int) -> None:
    if not settings.FEATURE_PROMETHEUS_METRICS:
        return
    _init_metrics()
    assert MATCHES_TOTAL is not None and MATCH_ROUNDS is not None
    MATCHES_TOTAL.labels(verdict=verdict).inc()
    MATCH_ROUNDS.observe(rounds)


def record_cert_built() -> None:
    if not settings.FEATURE_PROMETHEUS_METRICS:
        return
    _init_metrics()
    assert CERTS_BUILT_TOTAL is not None
    CERTS_BUILT_TOTAL.inc()


def record_illegal_move(player: str, error: str) -> None:
    if not settings.FEATURE_PROMETHEUS_METRICS:
        return
    _init_metrics()
    assert ILLEGAL_MOVES_TOTAL is not None
    ILLEGAL_MOVES_TOTAL.labels(player=player, error=error).inc()


def render_latest() -> bytes:
    """Exposition-format snapshot of every registered metric."""
    return generate_latest(get_registry())
