"""Sobolev, Lebesgue and phase-space norms of fields on the torus."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np

from accretive_wave.exception import DomainError, MeanNotZero, UnsupportedDim
from accretive_wave.spectral import Field, Grid, derivative, to_spectral

if TYPE_CHECKING:
    from accretive_wave.propagators import State

__all__ = [
    "PhaseNorm",
    "gagliardo_seminorm",
    "h_norm",
    "h_norm_coefficients",
    "homogeneous_seminorm",
    "linf_norm",
    "lp_norm",
    "phase_norm",
    "w1inf_norm",
]

SOBOLEV_ORDER_RANGE = (-2.0, 6.0)
MEAN_TOLERANCE = 1e-12


def _check_order(s: float) -> None:
    low, high = SOBOLEV_ORDER_RANGE
    if not low <= s <= high:
        raise DomainError(
            f"Sobolev order {s} outside the supported range [{low}, {high}]"
        )


@lru_cache(maxsize=64)
def _bessel_weights(grid: Grid, s: float) -> np.ndarray:
    weights = (1.0 + grid.magnitudes**2) ** s
    weights.flags.writeable = False
    return weights


@lru_cache(maxsize=64)
def _riesz_weights(grid: Grid, s: float) -> np.ndarray:
    magnitudes = grid.magnitudes
    weights = np.zeros(grid.shape)
    nonzero = magnitudes > 0.0
    weights[nonzero] = magnitudes[nonzero] ** (2.0 * s)
    weights.flags.writeable = False
    return weights


def h_norm_coefficients(grid: Grid, coeffs: np.ndarray, s: float) -> float:
    """Inhomogeneous H^s norm of a field given by its coefficients."""
    weights = _bessel_weights(grid, float(s))
    total = float(np.sum(weights * (coeffs.real**2 + coeffs.imag**2)))
    return math.sqrt(grid.volume * total)


def h_norm(f: Field, s: float) -> float:
    """(vol * sum (1+|xi|^2)^s |c_k|^2)^(1/2), for s in [-2, 6]."""
    _check_order(s)
    return h_norm_coefficients(f.grid, to_spectral(f.values), s)


def homogeneous_seminorm(f: Field, s: float) -> float:
    """Fourier seminorm with multiplier |xi|^(2s); the mean contributes 0.

    :raises MeanNotZero: for negative orders on a field with nonzero mean.
    """
    _check_order(s)
    grid = f.grid
    coeffs = to_spectral(f.values)
    if s < 0:
        mean = abs(coeffs.flat[0])
        scale = max(float(np.max(np.abs(coeffs))), np.finfo(float).tiny)
        if mean > MEAN_TOLERANCE * scale:
            raise MeanNotZero(
                f"homogeneous seminorm of order {s} needs a mean-zero field "
                f"(mean is {coeffs.flat[0].real:.3e})"
            )
    weights = _riesz_weights(grid, float(s))
    total = float(np.sum(weights * np.abs(coeffs) ** 2))
    return math.sqrt(grid.volume * total)


def gagliardo_seminorm(f: Field, s: float) -> float:
    """Double-sum quadrature of the Gagliardo seminorm on a 1D torus.

    Pairs of distinct grid points are weighted by their periodic
    (minimum-image) distance to the power -(1 + 2s).
    """
    grid = f.grid
    if grid.dim != 1:
        raise UnsupportedDim(
            f"Gagliardo seminorm is only available in 1D (got dim "
            f"{grid.dim})"
        )
    if not 0.0 < s < 1.0:
        raise DomainError(f"Gagliardo order must lie in (0, 1) (got {s})")
    n = grid.n_per_axis
    values = f.values
    lags = np.arange(1, n)
    shifted = values[(np.arange(n)[None, :] + lags[:, None]) % n]
    distance = np.minimum(lags, n - lags) * grid.spacing
    squares = np.sum((values[None, :] - shifted) ** 2, axis=1)
    total = grid.spacing**2 * float(np.sum(squares / distance ** (1 + 2 * s)))
    return math.sqrt(total)


def linf_norm(f: Field) -> float:
    return float(np.max(np.abs(f.values)))


def w1inf_norm(f: Field) -> float:
    """max|f| plus the largest sup-norm of a spectral partial derivative."""
    slopes = [linf_norm(derivative(f, axis)) for axis in range(f.grid.dim)]
    return linf_norm(f) + max(slopes)


def lp_norm(f: Field, q: float) -> float:
    """Grid-quadrature L^q norm over the torus; q may be ``math.inf``."""
    if q == math.inf:
        return linf_norm(f)
    if not q >= 1.0:
        raise DomainError(f"Lebesgue exponent must be at least 1 (got {q})")
    integral = f.grid.cell_volume * float(np.sum(np.abs(f.values) ** q))
    return integral ** (1.0 / q)


@dataclass(frozen=True)
class PhaseNorm:
    """Norm of (u, v) in H^mu x H^(mu-1)."""

    u_norm: float
    v_norm: float
    order: float

    @property
    def total(self) -> float:
        return self.u_norm + self.v_norm


def phase_norm(state: State, mu: float) -> PhaseNorm:
    return PhaseNorm(h_norm(state.u, mu), h_norm(state.v, mu - 1.0), mu)
