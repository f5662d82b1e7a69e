"""accretive-wave command line tool."""
from __future__ import annotations

import argparse
import logging
import sys
from collections.abc import Sequence

from accretive_wave import __version__
from accretive_wave.command import Command, ExitCode
from accretive_wave.command.admissible import Admissible
from accretive_wave.command.solve import Solve
from accretive_wave.command.sweep import Sweep
from accretive_wave.command.verify import Verify
from accretive_wave.exception import (
    AccretiveWaveError,
    FileError,
    OptionError,
)

__all__ = ["COMMANDS", "main"]

DESCRIPTION = """
Solve u_tt - Delta u = u_t|u_t|^(p-1) on a periodic box with a
pseudospectral Picard scheme, or check the inequalities behind its local
existence theory on random ensembles.
"""

VERSION = f"%(prog)s {__version__}"

COMMANDS: dict[str, type[Command]] = {
    command.command_name: command
    for command in (Solve, Sweep, Verify, Admissible)
}

# errors reported as "error: ..." with exit code 2
USAGE_ERRORS = (OptionError, FileError, AccretiveWaveError)


def prepare_parser() -> argparse.ArgumentParser:
    """Helper function to build the parser of every subcommand."""
    parser = argparse.ArgumentParser(
        prog="accretive-wave", description=DESCRIPTION
    )
    parser.add_argument("--version", action="version", version=VERSION)
    parser.add_argument(
        "-s",
        "--silent",
        action="store_true",
        dest="silent",
        help="suppress all output except warnings and errors",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="store_true",
        dest="verbose",
        help="log slab acceptance, Picard ratios and sample counts",
    )
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    for name, command in COMMANDS.items():
        subparser = subparsers.add_parser(
            name, help=command.description, description=command.description
        )
        command.add_arguments(subparser)
    return parser


def parse_command_line(
    parser: argparse.ArgumentParser, argv: Sequence[str] | None = None
) -> argparse.Namespace:
    """Helper function to parse the command line."""
    args = parser.parse_args(argv)
    if args.command is None:
        parser.error("a command must be specified")
    if args.silent and args.verbose:
        parser.error("--silent and --verbose are mutually exclusive")
    return args


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point for accretive-wave script."""
    args = parse_command_line(prepare_parser(), argv)
    if args.silent:
        level = logging.WARNING
    elif args.verbose:
        level = logging.DEBUG
    else:
        level = logging.INFO
    logging.basicConfig(level=level, format="%(levelname)s: %(message)s")
    logging.getLogger().setLevel(level)
    try:
        command = COMMANDS[args.command].from_args(args)
        command.ensure_finalized()
        return int(command.run())
    except USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return int(ExitCode.CONFIG_ERROR)
