"""
Command-line entry point for the housing-quality pipeline.
"""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from hqlens.config.loader import load_run_config
from hqlens.errors import ConfigError
from hqlens.pipeline import (
    COMMANDS,
    EXIT_CONFIG_FAILURE,
    ArtifactStore,
    ErrorReport,
    emit_error,
    run,
)

from .logging import setup_logging


def build_parser() -> argparse.ArgumentParser:
    """
    Build the argument parser.

    Returns
    -------
    argparse.ArgumentParser
        Parser with one subcommand per stage plus "all".
    """
    parser = argparse.ArgumentParser(
        prog="hqlens",
        description="Housing-quality assessment from resident posts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        p = sub.add_parser(
            command,
            help="run every stage" if command == "all" else f"run the {command} stage",
        )
        p.add_argument("--config", required=True, help="run configuration file")
        p.add_argument("--output-dir", help="override the output directory")
        p.add_argument(
            "--backend", help='backend selector: "rule", "llm" or "predictions:<path>"'
        )
        p.add_argument("--log-level", help="logging level, e.g. DEBUG")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """
    Pipeline run.

    Parameters
    ----------
    argv : Sequence[str] | None
        Arguments; sys.argv[1:] when None.

    Returns
    -------
    int
        Exit status.
    """
    args = build_parser().parse_args(argv)
    logger = logging.getLogger(__name__)

    try:
        setup_logging(level=args.log_level)
        config = load_run_config(
            args.config, backend=args.backend, output_dir=args.output_dir
        )
    except ConfigError as exc:
        logger.error("Invalid configuration: %s", exc)
        store = ArtifactStore(Path(args.output_dir)) if args.output_dir else None
        emit_error(ErrorReport.from_exception(exc, None), store)
        return EXIT_CONFIG_FAILURE

    return run(args.command, config)


if __name__ == "__main__":
    sys.exit(main())
