"""Base class and exit codes of the accretive-wave subcommands."""
from __future__ import annotations

import argparse
from enum import IntEnum
from pathlib import Path
from typing import Any, ClassVar

from setuptools import Command as _Command
from setuptools import Distribution

from accretive_wave.exception import OptionError
from accretive_wave.solver import Outcome

__all__ = ["DEFAULT_OUT", "DIST_ATTRS", "OUTCOME_CODES", "Command", "ExitCode"]

DEFAULT_OUT = "output"
DIST_ATTRS = {"name": "accretive-wave"}


class ExitCode(IntEnum):
    OK = 0
    FAILED = 1
    CONFIG_ERROR = 2
    BLOWUP = 10
    UNDERFLOW = 11


OUTCOME_CODES = {
    Outcome.REACHED_HORIZON: ExitCode.OK,
    Outcome.BLOWUP_DETECTED: ExitCode.BLOWUP,
    Outcome.SLAB_UNDERFLOW: ExitCode.UNDERFLOW,
}


class Command(_Command):
    """A setuptools command that is also an accretive-wave subcommand.

    Each entry of ``user_options`` is a tuple (long name, short name or
    None, help); a long name ending in "=" takes a value, the others are
    boolean flags. The same tuples declare the argparse arguments.
    """

    command_name: ClassVar[str] = ""
    description: ClassVar[str] = ""
    user_options: ClassVar[list[tuple[str, str | None, str]]] = []

    @staticmethod
    def option_dest(long_name: str) -> str:
        return long_name.rstrip("=").replace("-", "_")

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        for long_name, short_name, help_text in cls.user_options:
            flags = [f"--{long_name.rstrip('=')}"]
            if short_name:
                flags.insert(0, f"-{short_name}")
            dest = cls.option_dest(long_name)
            if long_name.endswith("="):
                parser.add_argument(*flags, dest=dest, help=help_text)
            else:
                parser.add_argument(
                    *flags, dest=dest, action="store_true", help=help_text
                )

    @classmethod
    def from_args(
        cls, args: argparse.Namespace, dist: Distribution | None = None
    ) -> Command:
        options = {}
        for long_name, _, _ in cls.user_options:
            dest = cls.option_dest(long_name)
            value = getattr(args, dest, None)
            if value is not None:
                options[dest] = value
        return cls(dist or Distribution(DIST_ATTRS), **options)

    # helpers shared by the subcommands

    def require(self, name: str) -> Any:
        value = getattr(self, name)
        if value is None:
            raise OptionError(f"--{name.replace('_', '-')} is required")
        return value

    def as_float(self, name: str) -> float | None:
        value = getattr(self, name)
        if value is None or isinstance(value, float):
            return value
        try:
            return float(value)
        except ValueError:
            raise OptionError(
                f"--{name}: expected a number (got {value!r})"
            ) from None

    def as_int(self, name: str) -> int | None:
        value = getattr(self, name)
        if value is None or isinstance(value, int):
            return value
        try:
            return int(value)
        except ValueError:
            raise OptionError(
                f"--{name}: expected an integer (got {value!r})"
            ) from None

    def output_dir(self) -> Path:
        out = Path(getattr(self, "out", None) or DEFAULT_OUT)
        out.mkdir(parents=True, exist_ok=True)
        return out
