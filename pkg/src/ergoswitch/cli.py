"""Command-line entry point: `ergoswitch run` and `ergoswitch verify`."""

from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from ergoswitch import __version__
from ergoswitch.config import configure_logging, get_settings
from ergoswitch.errors import ConfigValidationError, ErgoswitchError
from ergoswitch.output import render_json
from ergoswitch.runconfig import load_run_config
from ergoswitch.runner import run
from ergoswitch.verification import SUITES, verify

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_RESIDUAL = 3


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with the run and verify subcommands."""
    parser = argparse.ArgumentParser(
        prog="ergoswitch",
        description="Daemonic ergotropy of quantum-switched channels",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--log-level",
        type=str.upper,
        choices=("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"),
        help="Overrides ERGOSWITCH_LOG_LEVEL",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run_parser = commands.add_parser("run", help="Evaluate a scenario configuration")
    run_parser.add_argument("config", type=Path, help="TOML run configuration")
    run_parser.add_argument("--out", type=Path, help="Output directory")
    run_parser.add_argument("--points", type=int, help="Override the sweep point count")
    run_parser.add_argument("--seed", type=int, help="Override the configuration seed")

    verify_parser = commands.add_parser("verify", help="Run invariant suites")
    verify_parser.add_argument("suite", choices=(*SUITES, "all"))
    verify_parser.add_argument("--seed", type=int, help="Generator seed")
    verify_parser.add_argument("--out", type=Path, help="Also write the report to this file")
    return parser


def _run(args: argparse.Namespace) -> int:
    try:
        config = load_run_config(args.config)
        envelope = run(config, out_dir=args.out, points=args.points, seed=args.seed)
    except ConfigValidationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    if envelope.max_residual is not None:
        print(f"max oracle residual: {envelope.max_residual:.3e}", file=sys.stderr)
    return envelope.exit_code


def _verify(args: argparse.Namespace) -> int:
    seed = args.seed if args.seed is not None else get_settings().default_seed
    report = verify(args.suite, seed)
    text = render_json(report)
    sys.stdout.write(text)
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text, encoding="utf-8")
    return EXIT_OK if report.passed else EXIT_FAILED


def main(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, run the command and return its exit code.

    Exit codes: 0 success, 1 failed verification, 2 configuration error,
    3 oracle residual above Settings.residual_limit.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level or get_settings().log_level)
    try:
        if args.command == "run":
            return _run(args)
        return _verify(args)
    except ErgoswitchError as e:
        logger.error("%s", e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILED


__all__ = ["EXIT_OK", "EXIT_FAILED", "EXIT_CONFIG", "EXIT_RESIDUAL", "build_parser", "main"]
