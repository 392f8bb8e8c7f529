"""Command-line entry point.

    nskq simulate|radius|bootstrap --config run.json [--seed N] [--out DIR]
    nskq verify <check> [--config run.json] [--seed N] [--out DIR]

Exit status is 0 when every enabled check passes, 1 when some check fails
and 2 when the configuration cannot be loaded or validated, or when the run
stops on missing inputs or unwritable artifacts.
"""

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from pydantic import ValidationError

from nskq.core.config import VERIFY_CHECKS, RunConfig
from nskq.core.errors import NskqError
from nskq.core.runner import run

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=str, default=None, help="JSON run configuration")
    parser.add_argument("--seed", type=int, default=None, help="Override the configured seed")
    parser.add_argument("--out", type=str, default=None, help="Override the output directory")
    parser.add_argument(
        "--log-level",
        type=str,
        default="INFO",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
    )


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per run mode."""
    parser = argparse.ArgumentParser(
        prog="nskq",
        description="Spectral experiments for the quantum Navier-Stokes-Korteweg system",
    )
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode, help_text in (
        ("simulate", "Solve the Duhamel fixed point and write norms, radii and snapshots"),
        ("radius", "Track the radius of analyticity along a solution"),
        ("bootstrap", "Evaluate the bootstrap hypothesis on dyadic horizons"),
    ):
        _add_common(sub.add_parser(mode, help=help_text))
    verify = sub.add_parser("verify", help="Run one verification check")
    verify.add_argument("check", choices=sorted(VERIFY_CHECKS))
    _add_common(verify)
    return parser


def load_config(args: argparse.Namespace) -> RunConfig:
    """Read the configuration file and apply the command-line overrides.

    Raises:
        ValueError: If the file is missing, unreadable or invalid

    """
    data: dict[str, Any] = {}
    if args.config:
        path = Path(args.config)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except OSError as e:
            raise ValueError(f"Cannot read config file {path}: {e}") from e
        except json.JSONDecodeError as e:
            raise ValueError(f"Config file {path} is not valid JSON: {e}") from e
        if not isinstance(data, dict):
            raise ValueError(f"Config file {path} must hold a JSON object.")
    data["mode"] = args.mode
    if args.mode == "verify":
        data["check"] = args.check
    if args.seed is not None:
        data["seed"] = args.seed
    if args.out is not None:
        data["output_dir"] = args.out
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ValueError(f"Invalid configuration:\n{e}") from e


def main(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, run and return the exit status."""
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        config = load_config(args)
    except ValueError as e:
        logger.error(str(e))
        return EXIT_CONFIG
    try:
        report = run(config)
    except (NskqError, OSError, RuntimeError) as e:
        logger.error(f"Run failed: {e}")
        return EXIT_CONFIG
    for check in report.checks:
        status = "pass" if check.passed else "FAIL"
        suffix = f" ({check.error})" if check.error else ""
        print(f"{check.name}: {status}{suffix}")
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
