"""
Logging configuration for pipeline runs.
"""

from __future__ import annotations

import logging
import os
import sys

from hqlens.errors import ConfigError

LOG_LEVEL_ENV = "HQLENS_LOG_LEVEL"

_QUIET_LOGGERS = ("asyncio", "httpx", "httpcore")


def resolve_level(level: str | None) -> int:
    """
    Pick the effective logging level.

    Parameters
    ----------
    level : str | None
        Level name from the command line. Falls back to the HQLENS_LOG_LEVEL
        environment variable, then "INFO".

    Returns
    -------
    int
        Numeric logging level.

    Raises
    ------
    ConfigError
        If the name is not a standard logging level.
    """
    name = (level or os.getenv(LOG_LEVEL_ENV) or "INFO").strip().upper()
    value = logging.getLevelNamesMapping().get(name)
    if value is None:
        raise ConfigError("log_level", f"unknown logging level {name!r}")
    return value


def setup_logging(*, level: str | None = None) -> None:
    """
    Configure process-wide logging on stderr.

    Parameters
    ----------
    level : str | None
        Logging level name, e.g. "DEBUG".

    Returns
    -------
    None
    """
    lvl = resolve_level(level)
    logging.basicConfig(
        level=lvl,
        format="%(asctime)s.%(msecs)03d %(levelname)s %(name)s: %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
        stream=sys.stderr,
        force=True,
    )

    # HTTP request lines only at DEBUG.
    quiet = logging.WARNING if lvl > logging.DEBUG else logging.DEBUG
    for name in _QUIET_LOGGERS:
        logging.getLogger(name).setLevel(quiet)
