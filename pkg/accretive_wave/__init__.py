"""Pseudospectral solver and estimate laboratory for the accretive wave
equation u_tt - Delta u = u_t |u_t|^(p-1) on periodic boxes.
"""
from __future__ import annotations

from accretive_wave.admissibility import (
    AdmissibleDecision,
    Theorem,
    check_admissible,
)
from accretive_wave.estimates import (
    VERIFIERS,
    EnsembleSpec,
    EstimateReport,
    generate_ensemble,
)
from accretive_wave.norms import PhaseNorm, h_norm, phase_norm
from accretive_wave.propagators import State, homogeneous_solution
from accretive_wave.solver import (
    Outcome,
    SolverConfig,
    Trajectory,
    continue_to_tmax,
)
from accretive_wave.spectral import Field, Grid

__all__ = [
    "VERIFIERS",
    "AdmissibleDecision",
    "EnsembleSpec",
    "EstimateReport",
    "Field",
    "Grid",
    "Outcome",
    "PhaseNorm",
    "SolverConfig",
    "State",
    "Theorem",
    "Trajectory",
    "__version__",
    "check_admissible",
    "continue_to_tmax",
    "generate_ensemble",
    "h_norm",
    "homogeneous_solution",
    "phase_norm",
]

__version__ = "0.3.0"
