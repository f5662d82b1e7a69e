"""Implements the 'admissible' command (parameter check of a theorem)."""
from __future__ import annotations

import json

from accretive_wave.admissibility import (
    Theorem,
    check_admissible,
    infer_theorem,
)
from accretive_wave.command import Command, ExitCode
from accretive_wave.exception import OptionError

__all__ = ["Admissible"]


class Admissible(Command):
    """Print the admissibility decision for (mu, p, N) as JSON."""

    command_name = "admissible"
    description = "decide whether (mu, p, N) meets an existence theorem"
    user_options = [
        ("mu=", None, "Sobolev order of the phase space (>= 1)"),
        ("p=", None, "power of the nonlinearity (> 1)"),
        ("N=", None, "space dimension [default: 1]"),
        ("theorem=", None, "1 (integer p) or 2 (real p) [default: from p]"),
    ]

    def initialize_options(self) -> None:
        self.mu = None
        self.p = None
        self.N = None
        self.theorem = None

    def finalize_options(self) -> None:
        self.mu = self.as_float("mu")
        self.p = self.as_float("p")
        self.require("mu")
        self.require("p")
        self.N = self.as_int("N")
        if self.N is None:
            self.N = 1
        theorem = self.as_int("theorem")
        if theorem is None:
            self.theorem = infer_theorem(self.p)
        elif theorem in (1, 2):
            self.theorem = Theorem(theorem)
        else:
            raise OptionError(f"--theorem: expected 1 or 2 (got {theorem})")

    def run(self) -> ExitCode:
        decision = check_admissible(self.theorem, self.mu, self.p, self.N)
        print(json.dumps(decision.to_dict(), sort_keys=True))
        return ExitCode.OK if decision.admissible else ExitCode.FAILED
