"""Implements the 'verify' command (run one estimate verifier)."""
from __future__ import annotations

import argparse
import logging
import math
from typing import Any

from setuptools import Distribution

from accretive_wave import __version__
from accretive_wave.command import Command, ExitCode
from accretive_wave.common import config_hash, format_float
from accretive_wave.config import (
    VerifyConfig,
    load_verify_config,
    parse_verify_document,
)
from accretive_wave.estimates import VERIFIERS, EstimateReport
from accretive_wave.exception import OptionError
from accretive_wave.report import RunManifest, append_report_row

__all__ = ["Verify", "run_verifier"]

# verifiers whose inequality is stated for nonnegative fields
NONNEGATIVE_VERIFIERS = frozenset({"difference", "power", "product"})


def _parameter(value: Any) -> Any:
    if isinstance(value, str) and value in ("inf", "Infinity"):
        return math.inf
    if isinstance(value, list):
        return tuple(_parameter(item) for item in value)
    return value


def run_verifier(name: str, config: VerifyConfig) -> EstimateReport:
    """Call verifier ``name`` with its defaults updated by the config."""
    if name not in VERIFIERS:
        raise OptionError(
            f"verifier: unknown name {name!r} (valid names: "
            f"{', '.join(sorted(VERIFIERS))})"
        )
    verifier = VERIFIERS[name]
    parameters = dict(verifier.defaults)
    for key, value in config.parameters.items():
        if key not in parameters:
            raise OptionError(
                f"parameters.{key}: unknown parameter of {name} "
                f"(expected one of {', '.join(sorted(parameters))})"
            )
        parameters[key] = value
    spec = config.spec
    ensemble = config.document.get("ensemble") or {}
    if name in NONNEGATIVE_VERIFIERS and "nonnegative" not in ensemble:
        spec = spec.replace(nonnegative=True)
    logging.info(
        "verifier %s on %d samples (N=%d, n=%d)",
        name,
        spec.count,
        spec.grid.dim,
        spec.grid.n_per_axis,
    )
    return verifier.function(
        spec, **{key: _parameter(value) for key, value in parameters.items()}
    )


class Verify(Command):
    """Run one verifier on a seeded ensemble and append a report row."""

    command_name = "verify"
    description = "check one supporting inequality on a random ensemble"
    user_options = [
        ("config=", "c", "JSON configuration of the ensemble"),
        ("out=", "o", "output directory [default: output]"),
        ("seed=", None, "override the ensemble seed"),
    ]

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        parser.add_argument(
            "verifier",
            nargs="?",
            metavar="NAME",
            help=f"one of {', '.join(sorted(VERIFIERS))}",
        )
        super().add_arguments(parser)

    @classmethod
    def from_args(
        cls, args: argparse.Namespace, dist: Distribution | None = None
    ) -> Command:
        command = super().from_args(args, dist)
        command.verifier = args.verifier
        return command

    def initialize_options(self) -> None:
        self.verifier = None
        self.config = None
        self.out = None
        self.seed = None
        self.verify_config: VerifyConfig | None = None

    def finalize_options(self) -> None:
        self.seed = self.as_int("seed")
        if self.config is None:
            self.verify_config = parse_verify_document({}, self.seed)
        else:
            self.verify_config = load_verify_config(self.config, self.seed)
        self.verifier = self.verifier or self.verify_config.verifier
        if self.verifier is None:
            raise OptionError(
                "verifier: give a name on the command line or in the "
                f"config (valid names: {', '.join(sorted(VERIFIERS))})"
            )
        if self.verifier not in VERIFIERS:
            raise OptionError(
                f"verifier: unknown name {self.verifier!r} (valid names: "
                f"{', '.join(sorted(VERIFIERS))})"
            )

    def run(self) -> ExitCode:
        config = self.verify_config
        out = self.output_dir()
        digest = config_hash(config.document)
        manifest = RunManifest("verify", digest, config.seed, __version__)
        report = run_verifier(self.verifier, config)
        path = append_report_row(
            out / "reports.csv", report, digest, config.seed
        )
        manifest.add_output(path)
        manifest.finish(
            verifier=report.verifier_name,
            passed=report.passed,
            ratio_max=report.ratio_max,
        )
        manifest.write(out / f"verify-{self.verifier}.manifest.json")
        status = "pass" if report.passed else "FAIL"
        print(
            f"{report.verifier_name}: {status} ratio_max="
            f"{format_float(report.ratio_max)} samples={report.samples} "
            f"degenerate={report.degenerate}"
        )
        return ExitCode.OK if report.passed else ExitCode.FAILED
