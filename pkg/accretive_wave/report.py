"""Output files of the commands: CSV tables, run manifests and plots.

All CSV numbers are written with 17 significant digits and ``\\n`` line
endings so that a rerun with the same configuration and seed produces
byte-identical files.
"""
from __future__ import annotations

import csv
import json
import logging
from collections.abc import Iterable, Sequence
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

from accretive_wave.common import (
    canonical_json,
    csv_value,
    file_digest,
    timestamp,
)
from accretive_wave.estimates import EstimateReport
from accretive_wave.exception import OptionError
from accretive_wave.solver import Trajectory

__all__ = [
    "REPORT_COLUMNS",
    "SWEEP_COLUMNS",
    "TRAJECTORY_COLUMNS",
    "RunManifest",
    "SweepRow",
    "append_report_row",
    "trajectory_rows",
    "write_sweep_csv",
    "write_trajectory_csv",
    "write_trajectory_svg",
]

TRAJECTORY_COLUMNS = (
    "t",
    "phase_norm_total",
    "u_Hmu",
    "v_Hmu1",
    "energy",
    "linf_v",
    "spectral_tail_fraction",
    "w1inf_u",
)
REPORT_COLUMNS = (
    "verifier",
    "config_hash",
    "seed",
    "samples",
    "degenerate",
    "ratio_max",
    "ratio_mean",
    "ratio_p95",
    "passed",
    "parameters",
)
SWEEP_COLUMNS = (
    "cell",
    "p",
    "mu",
    "amplitude",
    "outcome",
    "tmax_estimate",
    "final_time",
    "max_phase_norm",
)


def _write_rows(
    path: Path, columns: Sequence[str], rows: Iterable[Sequence[Any]]
) -> None:
    with path.open("w", newline="", encoding="utf-8") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([csv_value(value) for value in row])


def trajectory_rows(trajectory: Trajectory) -> list[tuple[float, ...]]:
    return [
        (
            snap.t,
            snap.phase.total,
            snap.phase.u_norm,
            snap.phase.v_norm,
            snap.energy,
            snap.linf_v,
            snap.tail,
            snap.w1inf_u,
        )
        for snap in trajectory.snapshots
    ]


def write_trajectory_csv(path: str | Path, trajectory: Trajectory) -> Path:
    path = Path(path)
    _write_rows(path, TRAJECTORY_COLUMNS, trajectory_rows(trajectory))
    logging.info("wrote %d snapshots to %s", len(trajectory.snapshots), path)
    return path


def append_report_row(
    path: str | Path, report: EstimateReport, config_hash: str, seed: int
) -> Path:
    """Append one verifier run, writing the header on a new file."""
    path = Path(path)
    new_file = not path.exists()
    row = (
        report.verifier_name,
        config_hash,
        seed,
        report.samples,
        report.degenerate,
        report.ratio_max,
        report.ratio_mean,
        report.ratio_p95,
        report.passed,
        canonical_json(report.parameters),
    )
    with path.open("a", newline="", encoding="utf-8") as stream:
        writer = csv.writer(stream, lineterminator="\n")
        if new_file:
            writer.writerow(REPORT_COLUMNS)
        writer.writerow([csv_value(value) for value in row])
    return path


@dataclass(frozen=True)
class SweepRow:
    cell: int
    p: float
    mu: float
    amplitude: float
    outcome: str
    tmax_estimate: float
    final_time: float
    max_phase_norm: float

    def values(self) -> tuple[Any, ...]:
        return tuple(getattr(self, column) for column in SWEEP_COLUMNS)


def write_sweep_csv(path: str | Path, rows: Iterable[SweepRow]) -> Path:
    path = Path(path)
    ordered = sorted(rows, key=lambda row: row.cell)
    _write_rows(path, SWEEP_COLUMNS, (row.values() for row in ordered))
    return path


@dataclass
class RunManifest:
    """Provenance record written next to every output file."""

    command: str
    config_hash: str
    seed: int
    tool_version: str
    started: str = field(default_factory=timestamp)
    finished: str | None = None
    outcome: dict[str, Any] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)

    def add_output(self, path: str | Path) -> None:
        path = Path(path)
        self.outputs[path.name] = file_digest(path)

    def finish(self, **outcome: Any) -> None:
        self.outcome.update(outcome)
        self.finished = timestamp()

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        document = json.loads(canonical_json(self.to_dict()))
        path.write_text(
            json.dumps(document, indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )
        return path


def write_trajectory_svg(
    path: str | Path, trajectory: Trajectory, title: str = ""
) -> Path:
    """Line plot of the phase norm against time.

    :raises OptionError: when matplotlib is not installed.
    """
    try:
        import matplotlib

        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        raise OptionError(
            "--svg needs matplotlib (pip install accretive-wave[plot])"
        ) from None

    path = Path(path)
    times = trajectory.times
    totals = trajectory.phase_totals
    with matplotlib.rc_context({"svg.hashsalt": "accretive-wave"}):
        fig, ax = plt.subplots(figsize=(6.4, 4.0))
        ax.plot(times, totals, color="tab:red", linewidth=1.2)
        if totals.size and totals.min() > 0.0:
            ax.set_yscale("log")
        ax.set_xlabel("t")
        ax.set_ylabel("phase norm")
        if title:
            ax.set_title(title)
        ax.grid(True, alpha=0.3)
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
    return path
