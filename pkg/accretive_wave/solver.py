"""Picard iteration of the Duhamel map on time slabs, slab continuation up
to the horizon and blow-up detection in the phase-space norm.

The equation is u_tt - Delta u = a * u_t |u_t|^(p-1). On a slab of length
T the states at the M equispaced nodes tau_j = j T / (M - 1) are iterated
through U -> H(tau_j) U0 + L(U)(tau_j), where L is the Duhamel integral of
the forcing a * v|v|^(p-1) evaluated at the nodes.
"""
from __future__ import annotations

import logging
import math
import warnings
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.interpolate import BarycentricInterpolator

from accretive_wave.admissibility import (
    AdmissibleDecision,
    Theorem,
    check_admissible,
    infer_theorem,
)
from accretive_wave.exception import (
    AdmissibilityWarning,
    DomainError,
    NonContraction,
    NotAdmissible,
    OptionError,
    ResolutionWarning,
)
from accretive_wave.norms import (
    PhaseNorm,
    h_norm_coefficients,
    linf_norm,
    phase_norm,
    w1inf_norm,
)
from accretive_wave.propagators import (
    PropagatorSet,
    State,
    evolve_coefficients,
    linear_energy,
    simpson_weights,
)
from accretive_wave.spectral import (
    Grid,
    signed_power,
    spectral_tail_fraction,
    to_physical,
    to_spectral,
)

__all__ = [
    "ContinuityProfile",
    "Outcome",
    "Snapshot",
    "SolverConfig",
    "TimeSlab",
    "Trajectory",
    "continue_to_tmax",
    "continuity_profile",
    "energy_source",
    "phi_map",
    "picard_solve_slab",
    "suggest_slab_T",
]

TAIL_LIMIT = 0.01
SAFETY_FACTOR = 0.5
NON_CONTRACTION_STREAK = 3
UNDERFLOW_GROWTH = 1e3


class Outcome(Enum):
    REACHED_HORIZON = "ReachedHorizon"
    BLOWUP_DETECTED = "BlowupDetected"
    SLAB_UNDERFLOW = "SlabUnderflow"


@dataclass(frozen=True)
class SolverConfig:
    """Parameters of one solve.

    Validation failures raise :class:`OptionError` naming the configuration
    key of the offending value.
    """

    p: float
    mu: float
    grid: Grid
    slab_T_init: float
    slab_T_min: float
    horizon: float
    picard_tol: float = 1e-10
    picard_max_iters: int = 50
    quad_nodes_M: int = 17
    blowup_threshold: float = 1e8
    accretion: float = 1.0
    theorem: Theorem | None = None
    ignore_admissibility: bool = False
    record_nodes: bool = True

    def __post_init__(self) -> None:
        if not self.p > 1:
            raise OptionError(f"equation.p must be greater than 1 ({self.p})")
        if not self.mu >= 1:
            raise OptionError(f"equation.mu must be at least 1 ({self.mu})")
        if not math.isfinite(self.accretion):
            raise OptionError("equation.accretion must be finite")
        if not (math.isfinite(self.horizon) and self.horizon > 0):
            raise OptionError(
                f"solver.horizon must be positive and finite ({self.horizon})"
            )
        if not self.slab_T_min > 0:
            raise OptionError(
                f"solver.slab_T_min must be positive ({self.slab_T_min})"
            )
        if not self.slab_T_min < self.slab_T_init <= self.horizon:
            raise OptionError(
                "solver.slab_T_init must satisfy slab_T_min < slab_T_init "
                f"<= horizon ({self.slab_T_init})"
            )
        if not self.picard_tol > 0:
            raise OptionError(
                f"solver.picard_tol must be positive ({self.picard_tol})"
            )
        if self.picard_max_iters < 1:
            raise OptionError(
                "solver.picard_max_iters must be at least 1 "
                f"({self.picard_max_iters})"
            )
        if self.quad_nodes_M < 3 or self.quad_nodes_M % 2 == 0:
            raise OptionError(
                "solver.quad_nodes_M must be an odd integer >= 3 "
                f"({self.quad_nodes_M})"
            )
        if not self.blowup_threshold > 0:
            raise OptionError(
                "solver.blowup_threshold must be positive "
                f"({self.blowup_threshold})"
            )


@dataclass(frozen=True, eq=False)
class TimeSlab:
    """States at the quadrature nodes t0 + tau_j of [t0, t0 + T]."""

    t0: float
    T: float
    nodes: tuple[State, ...]

    @property
    def times(self) -> np.ndarray:
        count = len(self.nodes)
        return self.t0 + self.T * np.arange(count) / (count - 1)

    @property
    def end(self) -> State:
        return self.nodes[-1]


@dataclass(frozen=True, eq=False)
class Snapshot:
    t: float
    state: State
    phase: PhaseNorm
    energy: float
    linf_v: float
    w1inf_u: float
    tail: float


@dataclass(eq=False)
class Trajectory:
    snapshots: list[Snapshot] = field(default_factory=list)
    tmax_estimate: float = math.inf
    outcome: Outcome = Outcome.REACHED_HORIZON
    final_time: float = 0.0
    resolution_warning: bool = False
    admissibility_overridden: bool = False
    decision: AdmissibleDecision | None = None

    @property
    def times(self) -> np.ndarray:
        return np.array([snapshot.t for snapshot in self.snapshots])

    @property
    def phase_totals(self) -> np.ndarray:
        return np.array([snap.phase.total for snap in self.snapshots])


class _SlabKernel:
    """Multipliers and quadrature weights shared by all sweeps on a slab.

    Every lag between a node and an earlier node or midpoint is an integer
    multiple of half the node spacing, so one table of propagators serves
    the whole slab.
    """

    def __init__(self, grid: Grid, T: float, count: int) -> None:
        self.grid = grid
        self.count = count
        self.spacing = T / (count - 1)
        half = 0.5 * self.spacing
        self.lags = [
            PropagatorSet.at(grid, lag * half)
            for lag in range(2 * (count - 1) + 1)
        ]
        self.midpoint_stencils = [
            self._stencil(i) for i in range(count - 1)
        ]

    def _stencil(self, i: int) -> tuple[int, np.ndarray]:
        """Lagrange weights at the midpoint of nodes i and i + 1 from the
        (up to) four nearest nodes.
        """
        width = min(4, self.count)
        start = min(max(i - 1, 0), self.count - width)
        nodes = np.arange(start, start + width, dtype=float)
        basis = BarycentricInterpolator(nodes, np.eye(width))
        return start, np.asarray(basis(i + 0.5))

    def homogeneous(
        self, u0_hat: np.ndarray, v0_hat: np.ndarray
    ) -> tuple[np.ndarray, np.ndarray]:
        u = np.empty((self.count, *self.grid.shape), dtype=np.complex128)
        v = np.empty_like(u)
        for j in range(self.count):
            u[j], v[j] = evolve_coefficients(self.lags[2 * j], u0_hat, v0_hat)
        u[0], v[0] = u0_hat, v0_hat
        return u, v

    def midpoints(self, forcing: np.ndarray) -> np.ndarray:
        mids = np.empty((self.count - 1, *self.grid.shape), dtype=complex)
        for i, (start, weights) in enumerate(self.midpoint_stencils):
            window = forcing[start : start + len(weights)]
            mids[i] = np.tensordot(weights, window, axes=1)
        return mids

    def duhamel(self, forcing: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Duhamel pair at every node from the forcing at the nodes."""
        omega = np.zeros((self.count, *self.grid.shape), dtype=complex)
        omega_t = np.zeros_like(omega)
        mids = self.midpoints(forcing)
        for j in range(1, self.count):
            if j % 2 == 0:
                samples = [forcing[i] for i in range(j + 1)]
                weights = simpson_weights(j + 1, self.spacing)
                stride = 2
            else:
                samples = [
                    forcing[r // 2] if r % 2 == 0 else mids[r // 2]
                    for r in range(2 * j + 1)
                ]
                weights = simpson_weights(2 * j + 1, 0.5 * self.spacing)
                stride = 1
            last = len(samples) - 1
            for r, (weight, f_hat) in enumerate(zip(weights, samples)):
                propagators = self.lags[(last - r) * stride]
                omega[j] += weight * propagators.m_K * f_hat
                omega_t[j] += weight * propagators.m_Kdot * f_hat
        return omega, omega_t


def _forcing(
    grid: Grid, v_hat: np.ndarray, p: float, accretion: float
) -> np.ndarray:
    forcing = np.empty_like(v_hat)
    with np.errstate(over="ignore", invalid="ignore"):
        for j, coeffs in enumerate(v_hat):
            power = signed_power(grid, to_physical(coeffs), p)
            forcing[j] = accretion * to_spectral(power)
    return forcing


def _phase_totals(
    grid: Grid, u: np.ndarray, v: np.ndarray, mu: float
) -> np.ndarray:
    return np.array(
        [
            h_norm_coefficients(grid, u_j, mu)
            + h_norm_coefficients(grid, v_j, mu - 1.0)
            for u_j, v_j in zip(u, v)
        ]
    )


def _apply_phi(
    kernel: _SlabKernel,
    homogeneous: tuple[np.ndarray, np.ndarray],
    v: np.ndarray,
    cfg: SolverConfig,
) -> tuple[np.ndarray, np.ndarray]:
    forcing = _forcing(kernel.grid, v, cfg.p, cfg.accretion)
    omega, omega_t = kernel.duhamel(forcing)
    return homogeneous[0] + omega, homogeneous[1] + omega_t


def _iterate(
    kernel: _SlabKernel,
    u0_hat: np.ndarray,
    v0_hat: np.ndarray,
    cfg: SolverConfig,
) -> tuple[np.ndarray, np.ndarray, int, list[float]]:
    grid = kernel.grid
    homogeneous = kernel.homogeneous(u0_hat, v0_hat)
    u, v = homogeneous
    ratios: list[float] = []
    previous: float | None = None
    streak = 0
    for iteration in range(1, cfg.picard_max_iters + 1):
        new_u, new_v = _apply_phi(kernel, homogeneous, v, cfg)
        if not (np.all(np.isfinite(new_u)) and np.all(np.isfinite(new_v))):
            raise NonContraction(
                f"non-finite iterate after {iteration} iterations",
                iteration,
                ratios,
            )
        with np.errstate(over="ignore", invalid="ignore"):
            distance = float(
                np.max(_phase_totals(grid, new_u - u, new_v - v, cfg.mu))
            )
            size = float(np.max(_phase_totals(grid, new_u, new_v, cfg.mu)))
        u, v = new_u, new_v
        if previous is not None and previous > 0.0:
            ratio = distance / previous
            ratios.append(ratio)
            streak = streak + 1 if ratio >= 1.0 else 0
            if streak >= NON_CONTRACTION_STREAK or not math.isfinite(ratio):
                raise NonContraction(
                    f"ratios {ratios[-NON_CONTRACTION_STREAK:]} do not "
                    "contract",
                    iteration,
                    ratios,
                )
        logging.debug(
            "picard iteration %d: distance %.3e (size %.3e)",
            iteration,
            distance,
            size,
        )
        if distance < cfg.picard_tol * max(1.0, size):
            return u, v, iteration, ratios
        previous = distance
    raise NonContraction(
        f"no convergence within {cfg.picard_max_iters} iterations",
        cfg.picard_max_iters,
        ratios,
    )


def _slab_from_coefficients(
    grid: Grid, t0: float, T: float, u: np.ndarray, v: np.ndarray
) -> TimeSlab:
    nodes = tuple(
        State.from_coefficients(grid, u_j, v_j) for u_j, v_j in zip(u, v)
    )
    return TimeSlab(t0, T, nodes)


def phi_map(slab: TimeSlab, initial: State, cfg: SolverConfig) -> TimeSlab:
    """One application of the Duhamel map to the states of ``slab``."""
    count = len(slab.nodes)
    if count < 3 or count % 2 == 0:
        raise DomainError(f"a slab needs an odd node count >= 3 ({count})")
    grid = initial.grid
    kernel = _SlabKernel(grid, slab.T, count)
    homogeneous = kernel.homogeneous(*initial.coefficients())
    v = np.stack([to_spectral(node.v.values) for node in slab.nodes])
    u, v = _apply_phi(kernel, homogeneous, v, cfg)
    return _slab_from_coefficients(grid, slab.t0, slab.T, u, v)


def picard_solve_slab(
    initial: State, t0: float, T: float, cfg: SolverConfig
) -> tuple[TimeSlab, int, list[float]]:
    """Iterate the Duhamel map on [t0, t0 + T] from the homogeneous guess.

    :raises NonContraction: when three successive distance ratios are at
        least 1 or the iteration budget is exhausted; the caller is expected
        to halve T.
    """
    if T < cfg.slab_T_min:
        raise DomainError(
            f"slab length {T} is below slab_T_min={cfg.slab_T_min}"
        )
    kernel = _SlabKernel(initial.grid, T, cfg.quad_nodes_M)
    u, v, iterations, ratios = _iterate(
        kernel, *initial.coefficients(), cfg
    )
    slab = _slab_from_coefficients(initial.grid, t0, T, u, v)
    return slab, iterations, ratios


def energy_source(state: State, p: float, accretion: float = 1.0) -> float:
    """a times the integral of v * v|v|^(p-1), formed with the same
    nonlinearity the solver integrates.
    """
    grid = state.grid
    v_hat = to_spectral(state.v.values)
    forcing = to_spectral(signed_power(grid, state.v.values, p))
    product = float(np.sum((v_hat.conj() * forcing).real))
    return accretion * grid.volume * product


def _snapshot(t: float, state: State, mu: float) -> Snapshot:
    return Snapshot(
        t=t,
        state=state,
        phase=phase_norm(state, mu),
        energy=linear_energy(state),
        linf_v=linf_norm(state.v),
        w1inf_u=w1inf_norm(state.u),
        tail=max(
            spectral_tail_fraction(state.u), spectral_tail_fraction(state.v)
        ),
    )


def _check_admissibility(cfg: SolverConfig) -> tuple[AdmissibleDecision, bool]:
    theorem = cfg.theorem or infer_theorem(cfg.p)
    decision = check_admissible(theorem, cfg.mu, cfg.p, cfg.grid.dim)
    if decision.admissible:
        return decision, False
    if not cfg.ignore_admissibility:
        raise NotAdmissible(
            f"(mu={cfg.mu:g}, p={cfg.p:g}, N={cfg.grid.dim}) is outside "
            f"theorem {int(decision.theorem)}: {decision.reason}"
        )
    message = f"running outside the admissible range: {decision.reason}"
    logging.warning(message)
    warnings.warn(message, AdmissibilityWarning, stacklevel=3)
    return decision, True


def _end_in_underflow(trajectory: Trajectory, t: float) -> None:
    totals = trajectory.phase_totals
    growth = totals[-1] / totals[0] if totals[0] > 0.0 else 0.0
    if growth >= UNDERFLOW_GROWTH:
        trajectory.outcome = Outcome.BLOWUP_DETECTED
        trajectory.tmax_estimate = t
        logging.info(
            "blow-up detected at t=%.17g: slabs underflow after the phase "
            "norm grew by %.3g",
            t,
            growth,
        )
    else:
        trajectory.outcome = Outcome.SLAB_UNDERFLOW
        logging.info("slab underflow at t=%.17g (growth %.3g)", t, growth)


def continue_to_tmax(initial: State, cfg: SolverConfig) -> Trajectory:
    """March Picard slabs from t = 0 until the horizon, a blow-up or a slab
    underflow.

    On non-contraction the slab length is halved and never grown again.
    Blow-up is declared at the first node whose phase norm exceeds
    ``blowup_threshold``; its time is the T_max estimate. Slabs that shrink
    below ``slab_T_min`` after the phase norm grew by ``UNDERFLOW_GROWTH``
    also count as blow-up, at the last completed time; without that growth
    the run ends in SlabUnderflow.
    """
    decision, overridden = _check_admissibility(cfg)
    trajectory = Trajectory(
        decision=decision, admissibility_overridden=overridden
    )
    first = _snapshot(0.0, initial, cfg.mu)
    if first.phase.total >= cfg.blowup_threshold:
        raise OptionError(
            "solver.blowup_threshold must exceed the initial phase norm "
            f"{first.phase.total:.6g}"
        )
    grid = cfg.grid
    snapshots = trajectory.snapshots
    snapshots.append(first)
    t = 0.0
    T = cfg.slab_T_init
    u_hat, v_hat = initial.coefficients()
    while cfg.horizon - t > cfg.slab_T_min:
        step = min(T, cfg.horizon - t)
        kernel = _SlabKernel(grid, step, cfg.quad_nodes_M)
        try:
            u, v, iterations, ratios = _iterate(kernel, u_hat, v_hat, cfg)
        except NonContraction as exc:
            T *= 0.5
            logging.debug("slab at t=%.17g halved to %.3e: %s", t, T, exc)
            if T < cfg.slab_T_min:
                _end_in_underflow(trajectory, t)
                break
            continue
        logging.debug(
            "slab [%.6g, %.6g] accepted after %d iterations, ratios %s",
            t,
            t + step,
            iterations,
            [f"{ratio:.2e}" for ratio in ratios],
        )
        totals = _phase_totals(grid, u, v, cfg.mu)
        exceeding = np.flatnonzero(totals[1:] > cfg.blowup_threshold)
        last = exceeding[0] + 1 if exceeding.size else cfg.quad_nodes_M - 1
        recorded = range(1, last + 1) if cfg.record_nodes else (last,)
        for j in recorded:
            node_time = t + j * kernel.spacing
            state = State.from_coefficients(grid, u[j], v[j])
            snapshot = _snapshot(node_time, state, cfg.mu)
            snapshots.append(snapshot)
            if (
                snapshot.tail > TAIL_LIMIT
                and not trajectory.resolution_warning
            ):
                trajectory.resolution_warning = True
                message = (
                    f"spectral tail carries {snapshot.tail:.2%} of the "
                    f"energy at t={node_time:.6g}"
                )
                logging.warning(message)
                warnings.warn(message, ResolutionWarning, stacklevel=2)
        if exceeding.size:
            t += last * kernel.spacing
            trajectory.outcome = Outcome.BLOWUP_DETECTED
            trajectory.tmax_estimate = t
            logging.info("blow-up detected at t=%.17g", t)
            break
        t += step
        u_hat, v_hat = u[-1], v[-1]
    trajectory.final_time = t
    return trajectory


def suggest_slab_T(
    initial_norm: float,
    lam: float,
    eps: float,
    c_emp: float = 1.0,
    p: float = 2.0,
) -> float:
    """Largest T with C T^eps (lam + |U0|)^p <= lam and
    C T^eps (lam + |U0|)^(p-1) < 1, times a safety factor 1/2.
    """
    if not eps > 0:
        raise DomainError(f"eps must be positive (got {eps})")
    if not (c_emp > 0 and lam > 0 and initial_norm >= 0):
        raise DomainError("C and lambda must be positive, |U0| nonnegative")
    base = lam + initial_norm
    growth = (lam / (c_emp * base**p)) ** (1.0 / eps)
    contraction = (1.0 / (c_emp * base ** (p - 1.0))) ** (1.0 / eps)
    return SAFETY_FACTOR * min(growth, contraction)


@dataclass(frozen=True)
class ContinuityProfile:
    """Phase-norm jumps between successive recorded snapshots."""

    times: np.ndarray
    steps: np.ndarray
    jumps: np.ndarray

    @property
    def max_rate(self) -> float:
        if self.steps.size == 0:
            return 0.0
        return float(np.max(self.jumps / self.steps))


def continuity_profile(
    trajectory: Trajectory | Sequence[Snapshot], mu: float
) -> ContinuityProfile:
    snapshots = (
        trajectory.snapshots
        if isinstance(trajectory, Trajectory)
        else list(trajectory)
    )
    times = np.array([snapshot.t for snapshot in snapshots])
    jumps = np.array(
        [
            phase_norm(later.state - earlier.state, mu).total
            for earlier, later in zip(snapshots, snapshots[1:])
        ]
    )
    return ContinuityProfile(times[1:], np.diff(times), jumps)
