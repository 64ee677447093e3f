"""
Command dispatch, manifest upkeep and error reporting.
"""

from __future__ import annotations

import asyncio
import json
import logging
import sys
from dataclasses import dataclass
from typing import Any

import httpx

from hqlens.config import RunConfig
from hqlens.config.loader import config_hash
from hqlens.errors import ConfigError, HqlensError, StageError

from . import artifacts as art
from .stages import STAGES, Stage, StageContext

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_STAGE_FAILURE = 1
EXIT_CONFIG_FAILURE = 2

COMMANDS = (*(s.value for s in Stage), "all")


@dataclass(frozen=True, slots=True)
class ErrorReport:
    """
    Machine-readable description of a failed run.
    """

    exit_code: int
    error: str
    """
    Exception class name.
    """

    message: str
    stage: str | None = None
    field: str | None = None
    """
    Offending configuration field, for configuration failures.
    """

    @classmethod
    def from_exception(cls, exc: BaseException, stage: str | None) -> ErrorReport:
        """
        Describe an exception.

        Parameters
        ----------
        exc : BaseException
            Failure.
        stage : str | None
            Stage that was running.

        Returns
        -------
        ErrorReport
            Report with the exit code the failure maps to.
        """
        if isinstance(exc, ConfigError):
            return cls(
                EXIT_CONFIG_FAILURE, type(exc).__name__, str(exc), stage, exc.field
            )
        if isinstance(exc, StageError):
            stage = exc.stage
        return cls(EXIT_STAGE_FAILURE, type(exc).__name__, str(exc), stage)

    def to_wire(self) -> dict[str, Any]:
        """
        Convert to JSON form.

        Returns
        -------
        dict[str, Any]
            Error document.
        """
        return {
            "status": "error",
            "exit_code": self.exit_code,
            "error": self.error,
            "stage": self.stage,
            "field": self.field,
            "message": self.message,
        }


def emit_error(report: ErrorReport, store: art.ArtifactStore | None) -> None:
    """
    Write an error report to stderr and, when possible, the output directory.

    Parameters
    ----------
    report : ErrorReport
        Failure description.
    store : art.ArtifactStore | None
        Output directory, if known.

    Returns
    -------
    None
    """
    doc = report.to_wire()
    print(json.dumps(doc, ensure_ascii=False), file=sys.stderr)
    if store is not None and store.root.is_dir():
        store.write_json(art.ERROR_REPORT, doc)


def stages_for(command: str) -> list[Stage]:
    """
    Stages a command runs.

    Parameters
    ----------
    command : str
        A stage name or "all".

    Returns
    -------
    list[Stage]
        Stages in execution order.
    """
    if command == "all":
        return list(Stage)
    try:
        return [Stage(command)]
    except ValueError:
        raise ConfigError("command", f"unknown command {command!r}") from None


async def run_async(
    command: str,
    config: RunConfig,
    *,
    transport: httpx.AsyncBaseTransport | None = None,
) -> int:
    """
    Run a command inside an event loop.

    Parameters
    ----------
    command : str
        Stage name or "all".
    config : RunConfig
        Validated configuration.
    transport : httpx.AsyncBaseTransport | None
        HTTP transport override for the llm backend.

    Returns
    -------
    int
        Exit status: 0 success, 1 stage failure, 2 configuration failure.
    """
    ctx = StageContext.new(config, transport=transport)
    current: Stage | None = None
    try:
        stages = stages_for(command)
        ctx.store.prepare()
        stale = ctx.store.path(art.ERROR_REPORT)
        if stale.exists():
            stale.unlink()
        digest = config_hash(config)
        for current in stages:
            logger.info("Stage %s", current.value)
            await STAGES[current](ctx)
            ctx.store.write_manifest(digest)
    except (HqlensError, ValueError, KeyError, OSError) as exc:
        report = ErrorReport.from_exception(exc, current.value if current else None)
        logger.error("%s failed: %s", report.stage or "run", exc)
        emit_error(report, ctx.store)
        return report.exit_code
    return EXIT_OK


def run(
    command: str,
    config: RunConfig,
    *,
    transport: httpx.AsyncBaseTransport | None = None,
) -> int:
    """
    Run a pipeline command.

    Parameters
    ----------
    command : str
        "ingest", "extract", "weights", "score", "evaluate", "report" or "all".
    config : RunConfig
        Validated configuration.
    transport : httpx.AsyncBaseTransport | None
        HTTP transport override for the llm backend.

    Returns
    -------
    int
        Exit status.
    """
    return asyncio.run(run_async(command, config, transport=transport))
