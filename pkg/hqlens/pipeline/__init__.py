"""
Stage orchestration over on-disk artifacts.
"""

from .artifacts import ARTIFACTS, ArtifactStore
from .runner import (
    COMMANDS,
    EXIT_CONFIG_FAILURE,
    EXIT_OK,
    EXIT_STAGE_FAILURE,
    ErrorReport,
    emit_error,
    run,
    run_async,
)
from .stages import Stage, StageContext, build_backend

__all__ = [
    "ARTIFACTS",
    "COMMANDS",
    "EXIT_CONFIG_FAILURE",
    "EXIT_OK",
    "EXIT_STAGE_FAILURE",
    "ArtifactStore",
    "ErrorReport",
    "Stage",
    "StageContext",
    "build_backend",
    "emit_error",
    "run",
    "run_async",
]
