"""Neckpinch Lab Main Entry Point.

Command-line front end: parses the subcommand, loads the run document and
dispatches to the command implementations.

Exit status: the command's own status on completion, 2 for configuration
errors, 3 for file errors, 1 for any other laboratory error.

Author: Odiseo Team
Version: 1.0.0
"""

import argparse
import sys
from collections.abc import Callable, Sequence
from pathlib import Path

from app import __version__
from app.commands import cmd_bisect, cmd_run, cmd_soliton_check, cmd_sweep, cmd_validate
from app.exceptions import ConfigError, IoError, LabError
from app.models.config import RunConfig
from app.storage import load_run_config
from app.utils.logging import get_logger, print_banner, print_config_summary, setup_logging

logger = get_logger(__name__)

EXIT_LAB_ERROR = 1
EXIT_CONFIG_ERROR = 2
EXIT_IO_ERROR = 3

Command = Callable[[RunConfig, Path, int], int]

COMMANDS: dict[str, tuple[Command, str]] = {
    "run": (cmd_run, "integrate one initial profile and classify the singularity"),
    "sweep": (cmd_sweep, "probe several family members"),
    "bisect": (cmd_bisect, "bracket the critical family parameter"),
    "validate": (cmd_validate, "check the family conditions on the initial profile"),
    "soliton-check": (cmd_soliton_check, "evaluate the shrinking soliton identities"),
}


def _alpha_list(text: str) -> list[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid alpha list {text!r}") from e


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subparser per command."""
    parser = argparse.ArgumentParser(
        prog="neckpinch-lab",
        description="Rotationally symmetric Ricci flow neckpinch laboratory",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    for name, (_, help_text) in COMMANDS.items():
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument("--config", type=Path, required=True, help="run document (JSON)")
        sub.add_argument(
            "--out", type=Path, default=None, help="output directory (default: output_dir)"
        )
        sub.add_argument("--seed", type=_seed, default=None, help="overrides the document seed")
        if name == "sweep":
            sub.add_argument(
                "--alphas", type=_alpha_list, default=None, help="comma separated alphas"
            )
    return parser


def dispatch(args: argparse.Namespace) -> int:
    """Load the run document and run the selected command.

    Raises:
        LabError: Propagated from the command.
    """
    config = load_run_config(args.config)
    seed = config.seed if args.seed is None else args.seed
    out = config.output_dir if args.out is None else args.out
    if args.command == "sweep":
        return cmd_sweep(config, out, seed, args.alphas)
    command, _ = COMMANDS[args.command]
    return command(config, out, seed)


def main(argv: Sequence[str] | None = None) -> int:
    """CLI entry point; returns the process exit status."""
    args = build_parser().parse_args(argv)
    setup_logging()
    print_banner()
    print_config_summary(args.command)

    try:
        status = dispatch(args)
    except ConfigError as e:
        where = f" (field: {e.field_path})" if e.field_path else ""
        logger.error(f"Configuration error{where}: {e}")
        return EXIT_CONFIG_ERROR
    except IoError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_IO_ERROR
    except LabError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_LAB_ERROR
    logger.info(f"{args.command} exited with status {status}")
    return status


if __name__ == "__main__":
    sys.exit(main())
