"""Implements the 'sweep' command (solve a grid of parameter cells)."""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor

from accretive_wave import __version__
from accretive_wave._compat import worker_count
from accretive_wave.command import Command, ExitCode
from accretive_wave.common import config_hash
from accretive_wave.config import SweepConfig, load_sweep_config
from accretive_wave.exception import NotAdmissible
from accretive_wave.norms import phase_norm
from accretive_wave.report import RunManifest, SweepRow, write_sweep_csv
from accretive_wave.solver import continue_to_tmax

__all__ = ["Sweep", "run_cell"]

NOT_ADMISSIBLE = "NotAdmissible"


def run_cell(
    config: SweepConfig, cell: tuple[int, float, float, float]
) -> SweepRow:
    """Solve one (p, mu, amplitude) cell; cells share no mutable state."""
    index, p, mu, amplitude = cell
    solver = config.solver_for(p, mu)
    initial = config.base.initial_state(amplitude)
    try:
        trajectory = continue_to_tmax(initial, solver)
    except NotAdmissible as exc:
        logging.info("cell %d skipped: %s", index, exc)
        return SweepRow(
            index,
            p,
            mu,
            amplitude,
            NOT_ADMISSIBLE,
            math.nan,
            0.0,
            phase_norm(initial, mu).total,
        )
    logging.debug(
        "cell %d (p=%g, mu=%g, amplitude=%g): %s",
        index,
        p,
        mu,
        amplitude,
        trajectory.outcome.value,
    )
    return SweepRow(
        index,
        p,
        mu,
        amplitude,
        trajectory.outcome.value,
        trajectory.tmax_estimate,
        trajectory.final_time,
        float(trajectory.phase_totals.max()),
    )


class Sweep(Command):
    """Solve every cell of a p x mu x amplitude grid."""

    command_name = "sweep"
    description = "solve a grid of (p, mu, amplitude) cells concurrently"
    user_options = [
        ("config=", "c", "JSON configuration with a 'sweep' section"),
        ("out=", "o", "output directory [default: output]"),
        ("seed=", None, "override the seed of the initial data"),
        ("workers=", "j", "worker threads [default: ACCRETIVE_WAVE_THREADS]"),
    ]

    def initialize_options(self) -> None:
        self.config = None
        self.out = None
        self.seed = None
        self.workers = None
        self.sweep_config: SweepConfig | None = None

    def finalize_options(self) -> None:
        self.seed = self.as_int("seed")
        self.workers = self.as_int("workers") or worker_count()
        self.workers = max(1, self.workers)
        self.sweep_config = load_sweep_config(
            self.require("config"), self.seed
        )
        # every cell must form a valid solver configuration
        for _, p, mu, _ in self.sweep_config.cells():
            self.sweep_config.solver_for(p, mu)

    def run(self) -> ExitCode:
        config = self.sweep_config
        cells = config.cells()
        out = self.output_dir()
        manifest = RunManifest(
            "sweep",
            config_hash(config.document),
            config.base.seed,
            __version__,
        )
        logging.info(
            "sweeping %d cells on %d workers", len(cells), self.workers
        )
        with ThreadPoolExecutor(max_workers=self.workers) as executor:
            rows = list(
                executor.map(lambda cell: run_cell(config, cell), cells)
            )
        manifest.add_output(write_sweep_csv(out / "sweep.csv", rows))
        counts: dict[str, int] = {}
        for row in rows:
            counts[row.outcome] = counts.get(row.outcome, 0) + 1
        manifest.finish(cells=len(rows), outcomes=counts)
        manifest.write(out / "sweep.manifest.json")
        for outcome, count in sorted(counts.items()):
            print(f"{outcome}: {count}")
        return ExitCode.OK
