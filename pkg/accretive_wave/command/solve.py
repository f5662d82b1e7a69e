"""Implements the 'solve' command (march one configuration in time)."""
from __future__ import annotations

import logging

from accretive_wave import __version__
from accretive_wave.command import OUTCOME_CODES, Command, ExitCode
from accretive_wave.common import config_hash, format_float
from accretive_wave.config import RunConfig, load_run_config
from accretive_wave.report import (
    RunManifest,
    write_trajectory_csv,
    write_trajectory_svg,
)
from accretive_wave.solver import continue_to_tmax

__all__ = ["Solve"]


class Solve(Command):
    """Solve the equation until the horizon, a blow-up or a slab underflow."""

    command_name = "solve"
    description = (
        "march Picard slabs from the configured initial data and write "
        "the trajectory"
    )
    user_options = [
        ("config=", "c", "JSON configuration of the run"),
        ("out=", "o", "output directory [default: output]"),
        ("seed=", None, "override the seed of the initial data"),
        ("svg", None, "also plot the phase norm against time as SVG"),
    ]

    def initialize_options(self) -> None:
        self.config = None
        self.out = None
        self.seed = None
        self.svg = False
        self.run_config: RunConfig | None = None

    def finalize_options(self) -> None:
        self.seed = self.as_int("seed")
        self.run_config = load_run_config(self.require("config"), self.seed)

    def run(self) -> ExitCode:
        cfg = self.run_config
        out = self.output_dir()
        manifest = RunManifest(
            "solve", config_hash(cfg.document), cfg.seed, __version__
        )
        solver = cfg.solver
        logging.info(
            "solving p=%g mu=%g N=%d n=%d up to t=%g",
            solver.p,
            solver.mu,
            solver.grid.dim,
            solver.grid.n_per_axis,
            solver.horizon,
        )
        trajectory = continue_to_tmax(cfg.initial_state(), solver)
        manifest.add_output(
            write_trajectory_csv(out / "trajectory.csv", trajectory)
        )
        if self.svg:
            title = f"p={solver.p:g}, mu={solver.mu:g}, N={solver.grid.dim}"
            manifest.add_output(
                write_trajectory_svg(
                    out / "trajectory.svg", trajectory, title
                )
            )
        manifest.finish(
            outcome=trajectory.outcome.value,
            tmax_estimate=trajectory.tmax_estimate,
            final_time=trajectory.final_time,
            resolution_warning=trajectory.resolution_warning,
            admissibility_overridden=trajectory.admissibility_overridden,
        )
        manifest.write(out / "trajectory.manifest.json")
        print(
            f"{trajectory.outcome.value}: "
            f"t={format_float(trajectory.final_time)}"
            f" tmax_estimate={format_float(trajectory.tmax_estimate)}"
        )
        return OUTCOME_CODES[trajectory.outcome]
