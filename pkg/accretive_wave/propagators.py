"""Wave propagators as exact Fourier multipliers.

With sigma = |xi| the propagators are K(t) = sin(sigma t)/sigma and
Kdot(t) = cos(sigma t). The homogeneous flow of (u0, v0) is
(Kdot u0 + K v0, Delta K u0 + Kdot v0), and a forcing f enters through the
Duhamel integrals of K(t - s) f(s) and Kdot(t - s) f(s).
"""
from __future__ import annotations

import math
import threading
from collections import OrderedDict
from collections.abc import Sequence
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from scipy.integrate import simpson

from accretive_wave._typing import ForcingHistory
from accretive_wave.exception import (
    DomainError,
    GridMismatch,
    QuadratureError,
)
from accretive_wave.spectral import Field, Grid, to_physical, to_spectral

__all__ = [
    "PropagatorSet",
    "State",
    "apply_DeltaK",
    "apply_K",
    "apply_Kdot",
    "clear_propagator_cache",
    "constant_forcing_response",
    "duhamel_integral",
    "homogeneous_solution",
    "linear_energy",
    "simpson_weights",
]

SMALL_FREQUENCY = 1e-8
NODE_TOLERANCE = 1e-9
# bytes of multiplier arrays kept across calls, shared by all grids
PROPAGATOR_CACHE_BYTES = 256 * 2**20


@dataclass(frozen=True, eq=False)
class State:
    """Phase-space point U = (u, u_t)."""

    u: Field
    v: Field

    def __post_init__(self) -> None:
        if self.u.grid != self.v.grid:
            raise GridMismatch(
                f"u lives on {self.u.grid!r} but v on {self.v.grid!r}"
            )

    @property
    def grid(self) -> Grid:
        return self.u.grid

    @classmethod
    def zeros(cls, grid: Grid) -> State:
        return cls(Field.zeros(grid), Field.zeros(grid))

    @classmethod
    def from_coefficients(
        cls, grid: Grid, u_hat: np.ndarray, v_hat: np.ndarray
    ) -> State:
        return cls(
            Field(grid, to_physical(u_hat)), Field(grid, to_physical(v_hat))
        )

    def coefficients(self) -> tuple[np.ndarray, np.ndarray]:
        return to_spectral(self.u.values), to_spectral(self.v.values)

    def __sub__(self, other: State) -> State:
        return State(self.u - other.u, self.v - other.v)

    def __add__(self, other: State) -> State:
        return State(self.u + other.u, self.v + other.v)


def _check_time(t: float) -> float:
    t = float(t)
    if not math.isfinite(t) or t < 0.0:
        raise DomainError(f"propagation time must be finite and >= 0 ({t})")
    return t


@dataclass(frozen=True, eq=False)
class PropagatorSet:
    """Multipliers of K(t), Kdot(t) and Delta K(t) on a grid lattice."""

    grid: Grid
    t: float
    m_K: np.ndarray
    m_Kdot: np.ndarray
    m_DeltaK: np.ndarray

    @classmethod
    def at(cls, grid: Grid, t: float) -> PropagatorSet:
        return _propagator_set(grid, _check_time(t))

    @cached_property
    def m_forced(self) -> np.ndarray:
        """(1 - cos(sigma t))/sigma^2, the response to a unit constant
        forcing; t^2/2 at the zero frequency.
        """
        sigma = self.grid.magnitudes
        small = sigma < SMALL_FREQUENCY
        safe = np.where(small, 1.0, sigma)
        values = np.where(
            small,
            0.5 * self.t**2,
            2.0 * np.sin(0.5 * safe * self.t) ** 2 / safe**2,
        )
        values.flags.writeable = False
        return values


_cache: OrderedDict[tuple[Grid, float], PropagatorSet] = OrderedDict()
_cache_lock = threading.Lock()


def _cache_nbytes() -> int:
    return sum(3 * entry.m_K.nbytes for entry in _cache.values())


def _build_propagator_set(grid: Grid, t: float) -> PropagatorSet:
    sigma = grid.magnitudes
    small = sigma < SMALL_FREQUENCY
    safe = np.where(small, 1.0, sigma)
    sine = np.sin(sigma * t)
    m_K = np.where(small, t, sine / safe)
    m_Kdot = np.cos(sigma * t)
    m_DeltaK = -sigma * sine
    for array in (m_K, m_Kdot, m_DeltaK):
        array.flags.writeable = False
    return PropagatorSet(grid, t, m_K, m_Kdot, m_DeltaK)


def _propagator_set(grid: Grid, t: float) -> PropagatorSet:
    """Least recently used sets are dropped once the cache holds more than
    PROPAGATOR_CACHE_BYTES; the newest set is always kept.
    """
    key = (grid, t)
    with _cache_lock:
        cached = _cache.get(key)
        if cached is not None:
            _cache.move_to_end(key)
            return cached
    propagators = _build_propagator_set(grid, t)
    with _cache_lock:
        propagators = _cache.setdefault(key, propagators)
        while len(_cache) > 1 and _cache_nbytes() > PROPAGATOR_CACHE_BYTES:
            _cache.popitem(last=False)
    return propagators


def clear_propagator_cache() -> None:
    with _cache_lock:
        _cache.clear()


def _apply(multiplier: np.ndarray, f: Field) -> Field:
    return Field(f.grid, to_physical(multiplier * to_spectral(f.values)))


def apply_K(t: float, g: Field) -> Field:
    return _apply(PropagatorSet.at(g.grid, t).m_K, g)


def apply_Kdot(t: float, f: Field) -> Field:
    if _check_time(t) == 0.0:
        return Field(f.grid, f.values)
    return _apply(PropagatorSet.at(f.grid, t).m_Kdot, f)


def apply_DeltaK(t: float, f: Field) -> Field:
    return _apply(PropagatorSet.at(f.grid, t).m_DeltaK, f)


def evolve_coefficients(
    propagators: PropagatorSet, u_hat: np.ndarray, v_hat: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Homogeneous flow H(t) applied to coefficient arrays."""
    return (
        propagators.m_Kdot * u_hat + propagators.m_K * v_hat,
        propagators.m_DeltaK * u_hat + propagators.m_Kdot * v_hat,
    )


def homogeneous_solution(t: float, initial: State) -> State:
    """H(t)U0 = (Kdot u0 + K v0, Delta K u0 + Kdot v0)."""
    if _check_time(t) == 0.0:
        return initial
    u_hat, v_hat = evolve_coefficients(
        PropagatorSet.at(initial.grid, t), *initial.coefficients()
    )
    return State.from_coefficients(initial.grid, u_hat, v_hat)


@lru_cache(maxsize=128)
def simpson_weights(count: int, spacing: float) -> np.ndarray:
    """Composite Simpson weights for ``count`` (odd) equispaced nodes."""
    if count < 1 or count % 2 == 0:
        raise QuadratureError(
            f"Simpson quadrature needs an odd node count (got {count})"
        )
    if count == 1:
        weights = np.zeros(1)
    else:
        weights = simpson(np.eye(count), dx=spacing, axis=-1)
    weights.flags.writeable = False
    return weights


def duhamel_coefficients(
    grid: Grid,
    t: float,
    forcing_hats: Sequence[np.ndarray],
    spacing: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Simpson sum of K(t - s_j) f_j and Kdot(t - s_j) f_j over equispaced
    nodes s_j = j * spacing ending at t.
    """
    count = len(forcing_hats)
    weights = simpson_weights(count, spacing)
    omega = np.zeros(grid.shape, dtype=np.complex128)
    omega_t = np.zeros(grid.shape, dtype=np.complex128)
    for j, (weight, f_hat) in enumerate(zip(weights, forcing_hats)):
        lag = (count - 1 - j) * spacing
        propagators = PropagatorSet.at(grid, lag)
        omega += weight * propagators.m_K * f_hat
        omega_t += weight * propagators.m_Kdot * f_hat
    return omega, omega_t


def duhamel_integral(
    t: float, forcing_at_nodes: ForcingHistory
) -> State:
    """(omega(t), omega_t(t)) for a forcing sampled at the nodes.

    :param forcing_at_nodes: pairs (s_j, f(s_j)) forming a uniform partition
        of [0, t] with an odd number of nodes.
    :raises QuadratureError: if the node count is even or the nodes are not
        the uniform partition of [0, t].
    """
    t = _check_time(t)
    count = len(forcing_at_nodes)
    if count == 0:
        raise QuadratureError("Duhamel integral needs at least one node")
    if count % 2 == 0:
        raise QuadratureError(
            f"Simpson quadrature needs an odd node count (got {count})"
        )
    if count == 1 and t > 0.0:
        raise QuadratureError("a single node cannot span a positive interval")
    grid = forcing_at_nodes[0][1].grid
    spacing = t / (count - 1) if count > 1 else 0.0
    tolerance = NODE_TOLERANCE * max(1.0, t)
    for j, (s, f) in enumerate(forcing_at_nodes):
        if f.grid != grid:
            raise GridMismatch(f"forcing node {j} lives on another grid")
        if abs(s - j * spacing) > tolerance:
            raise QuadratureError(
                f"node {j} at s={s} breaks the uniform partition of "
                f"[0, {t}]"
            )
    if t == 0.0:
        return State.zeros(grid)
    hats = [to_spectral(f.values) for _, f in forcing_at_nodes]
    omega, omega_t = duhamel_coefficients(grid, t, hats, spacing)
    return State.from_coefficients(grid, omega, omega_t)


def constant_forcing_response(t: float, f: Field) -> State:
    """Exact Duhamel response to the time-constant forcing f on [0, t]."""
    t = _check_time(t)
    propagators = PropagatorSet.at(f.grid, t)
    f_hat = to_spectral(f.values)
    return State.from_coefficients(
        f.grid, propagators.m_forced * f_hat, propagators.m_K * f_hat
    )


def linear_energy(state: State) -> float:
    """1/2 of the integral of v^2 + |grad u|^2."""
    grid = state.grid
    u_hat, v_hat = state.coefficients()
    density = np.abs(v_hat) ** 2 + grid.magnitudes**2 * np.abs(u_hat) ** 2
    return 0.5 * grid.volume * float(np.sum(density))
