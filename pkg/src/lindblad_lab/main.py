from __future__ import annotations

"""CLI entrypoint: ``analyze <scenario> --config <path>``."""

import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .config import Settings
from .errors import EXIT_INAPPLICABLE, EXIT_NUMERICAL, EXIT_OK, ConfigError, LindbladLabError
from .report import AnalysisReport
from .scenarios import ScenarioKind, load_config, run_scenario

logger = logging.getLogger(__name__)


def _parse_tolerance(text: str) -> tuple[str, float]:
    name, sep, value = text.partition("=")
    if not sep or not name:
        raise argparse.ArgumentTypeError(f"expected name=value, got '{text}'")
    try:
        return name.strip(), float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"tolerance '{name}' needs a number, got '{value}'") from None


def _parse_seed(text: str) -> int:
    try:
        seed = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got '{text}'") from None
    if seed < 0:
        raise argparse.ArgumentTypeError(f"seed must be non-negative, got {seed}")
    return seed


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(
        prog="lindblad-lab", description="Steady states and uniqueness of boundary-driven Lindbladians"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    analyze = commands.add_parser("analyze", help="Run one scenario and write its report")
    analyze.add_argument("scenario", choices=[kind.value for kind in ScenarioKind], help="Scenario to run")
    analyze.add_argument("--config", required=True, type=Path, help="JSON scenario configuration")
    analyze.add_argument("--output", type=Path, help="Report path (overrides the config; '-' for stdout)")
    analyze.add_argument("--seed", type=_parse_seed, help="Seed for randomised steps (non-negative)")
    analyze.add_argument(
        "--tol", action="append", default=[], type=_parse_tolerance, metavar="NAME=VALUE",
        help="Override a named tolerance (repeatable)",
    )
    analyze.add_argument("--summary", action="store_true", help="Print a plain-text summary")
    analyze.add_argument("--strict", action="store_true", help="Exit with code 2 if any verdict is inapplicable")
    verbosity = analyze.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("--quiet", action="store_true", help="Warnings and errors only")
    return parser.parse_args(argv)


def _emit(report: AnalysisReport, output: Optional[Path]) -> None:
    if output is None or str(output) == "-":
        sys.stdout.write(report.to_json() + "\n")
        return
    report.write(output)
    logger.info("Report written to %s", output)


def analyze(args: argparse.Namespace, settings: Optional[Settings] = None) -> int:
    tolerances: Dict[str, float] = dict(args.tol)
    settings = settings or Settings.from_env()
    config = load_config(args.config, scenario=args.scenario, settings=settings)
    config = config.with_overrides(tolerances=tolerances, seed=args.seed, output=args.output)

    report = run_scenario(config, settings)
    _emit(report, config.output)
    if args.summary:
        sys.stderr.write(report.summary() + "\n")

    inapplicable: List[str] = report.inapplicable
    if inapplicable:
        if args.strict:
            logger.error("Inapplicable verdicts: %s", ", ".join(inapplicable))
            return EXIT_INAPPLICABLE
        logger.warning("Inapplicable verdicts: %s", ", ".join(inapplicable))
    return EXIT_OK


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    args = parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="[%(asctime)s] %(levelname)s %(name)s: %(message)s")
    try:
        return analyze(args)
    except ConfigError as exc:
        logger.error("Invalid configuration: %s", exc)
        return exc.exit_code
    except LindbladLabError as exc:
        logger.error("%s", exc)
        return exc.exit_code
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return 130
    except Exception:
        logger.exception("Unexpected failure")
        return EXIT_NUMERICAL


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
