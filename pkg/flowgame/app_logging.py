import logging
import sys
from typing import Any, List

import structlog

from .settings import settings


def configure_logging(level: int = logging.INFO) -> None:
    # Choose renderer based on settings.LOG_JSON
    processors: List[Any] = [
        structlog.processors.TimeStamper(fmt="iso"),
        structlog.processors.add_log_level,
        structlog.processors.StackInfoRenderer(),
        structlog.processors.format_exc_info,
    ]
    if settings.LOG_JSON:
        processors.append(structlog.processors.JSONRenderer(sort_keys=True))
        fmt = "%(message)s"
    else:
        processors.append(structlog.dev.ConsoleRenderer(colors=False))
        fmt = "%(levelname)s %(message)s"

    resolved = getattr(logging, settings.LOG_LEVEL.upper(), level)
    # stderr keeps stdout free for command output
    logging.basicConfig(format=fmt, stream=sys.stderr, level=resolved)

    structlog.configure(
        processors=processors,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.make_filtering_bound_logger(resolved),
        cache_logger_on_first_use=True,
    )


logger = structlog.get_logger()
