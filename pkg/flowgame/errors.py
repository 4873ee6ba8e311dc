"""
Exception hierarchy shared by the referee, certificates, strategies and harness.
"""

from typing import Optional


class FlowGameError(Exception):
    """Base class for all flowgame errors"""


class ConfigError(FlowGameError, ValueError):
    """Invalid game configuration or parameter"""


# ---------------------------------------------------------------------------
# Referee
# ---------------------------------------------------------------------------


class GameError(FlowGameError):
    """Raised by the referee"""


class IllegalMoveError(GameError):
    """A move that the referee refuses; the mover loses immediately"""

    def __init__(self, node: Optional[str], message: str = "") -> None:
        self.node = node
        where = "Λ" if node == "" else node
        super().__init__(f"{type(self).__name__} at {where}" + (f": {message}" if message else ""))


class DecreaseRejected(IllegalMoveError):
    pass


class BudgetExceeded(IllegalMoveError):
    pass


class FlowViolation(IllegalMoveError):
    pass


class RootFlowChanged(IllegalMoveError):
    pass


class OutOfTree(IllegalMoveError):
    pass


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------


class CertificateError(FlowGameError):
    pass


class DomainError(CertificateError, ValueError):
    """Parameters outside the domain of a certificate formula"""


class SearchCapExceeded(CertificateError):
    """A parameter search ran past its configured cap"""


class CertificateInvariantError(CertificateError):
    """A certificate failed exact re-validation"""


# ---------------------------------------------------------------------------
# Strategies
# ---------------------------------------------------------------------------


class StrategyError(FlowGameError):
    pass


class InternalExhaustion(StrategyError):
    """The recursive strategy tried to advance past its last subgame"""


class ResourceCapExceeded(StrategyError):
    """A brute-force search was asked for an instance above its caps"""


class StrategyNotFound(StrategyError, KeyError):
    pass


class MonotonicityViolation(FlowGameError):
    """A marked branch failed to dominate its predecessor"""


# ---------------------------------------------------------------------------
# Traces
# ---------------------------------------------------------------------------


class TraceError(FlowGameError):
    pass


class TraceSchemaError(TraceError):
    pass


class ReplayDivergence(TraceError):
    def __init__(self, index: int, reason: str) -> None:
        self.index = index
        self.reason = reason
        super().__init__(f"replay diverged at event {index}: {reason}")
