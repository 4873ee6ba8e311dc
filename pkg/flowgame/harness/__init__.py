"""
Match running, trace persistence and replay verification.
"""

from flowgame.harness.match import MatchTrace, Referee, run_match, trace_header
from flowgame.harness.replay import ReplayReport, parse_trace, read_trace, verify_trace

__all__ = [
    "MatchTrace",
    "Referee",
    "run_match",
    "trace_header",
    "ReplayReport",
    "parse_trace",
    "read_trace",
    "verify_trace",
]
