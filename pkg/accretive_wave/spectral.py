"""Periodic grid, discrete Fourier transforms and the dealiased pointwise
nonlinearity.

Coefficients are mean-normalized: the coefficient at the zero frequency is
the mean of the field and a field is the plain sum of its Fourier modes.
Integrals over the torus carry the volume ``(2L)**dim``, so the sample-space
and the coefficient-space L2 norms agree.
"""
from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from accretive_wave._compat import fft_backend
from accretive_wave.exception import (
    DomainError,
    GridMismatch,
    SymmetryViolation,
)

__all__ = [
    "Field",
    "Grid",
    "SpectralField",
    "derivative",
    "forward_transform",
    "frequency_magnitudes",
    "inverse_transform",
    "pointwise_power",
    "signed_power",
    "spectral_tail_fraction",
    "to_physical",
    "to_spectral",
]

SYMMETRY_TOLERANCE = 1e-10
MIN_POINTS_PER_AXIS = 16


def _read_only(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class Grid:
    """Periodic torus ``[-L, L)**dim`` sampled with ``n_per_axis`` points
    per axis.
    """

    dim: int
    n_per_axis: int
    half_length: float

    def __post_init__(self) -> None:
        if self.dim not in (1, 2, 3):
            raise DomainError(f"dim must be 1, 2 or 3 (got {self.dim})")
        n = self.n_per_axis
        if n < MIN_POINTS_PER_AXIS or n & (n - 1):
            raise DomainError(
                "n_per_axis must be a power of two not smaller than "
                f"{MIN_POINTS_PER_AXIS} (got {n})"
            )
        if not (math.isfinite(self.half_length) and self.half_length > 0):
            raise DomainError(
                f"half_length must be positive (got {self.half_length})"
            )

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n_per_axis,) * self.dim

    @property
    def size(self) -> int:
        return self.n_per_axis**self.dim

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_length / self.n_per_axis

    @property
    def volume(self) -> float:
        return (2.0 * self.half_length) ** self.dim

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @cached_property
    def coordinates(self) -> tuple[np.ndarray, ...]:
        """Sample coordinates, one broadcast array per axis."""
        axis = -self.half_length + self.spacing * np.arange(self.n_per_axis)
        mesh = np.meshgrid(*([axis] * self.dim), indexing="ij")
        return tuple(_read_only(x) for x in mesh)

    @cached_property
    def lattice(self) -> tuple[np.ndarray, ...]:
        """Integer multi-indices k in FFT order, components in [-n/2, n/2)."""
        n = self.n_per_axis
        k = np.rint(np.fft.fftfreq(n, d=1.0 / n)).astype(np.int64)
        mesh = np.meshgrid(*([k] * self.dim), indexing="ij")
        return tuple(_read_only(x) for x in mesh)

    @cached_property
    def wavenumbers(self) -> tuple[np.ndarray, ...]:
        """Frequency components xi = (pi / L) * k."""
        scale = math.pi / self.half_length
        return tuple(_read_only(scale * k) for k in self.lattice)

    @cached_property
    def magnitudes(self) -> np.ndarray:
        squared = sum(xi**2 for xi in self.wavenumbers)
        return _read_only(np.sqrt(squared))

    @cached_property
    def nyquist_mask(self) -> np.ndarray:
        half = self.n_per_axis // 2
        mask = np.zeros(self.shape, dtype=bool)
        for k in self.lattice:
            mask |= np.abs(k) == half
        return _read_only(mask)

    @cached_property
    def tail_mask(self) -> np.ndarray:
        """Top third of the modes (max-norm of k above n/3)."""
        shell = np.max(np.abs(np.stack(self.lattice)), axis=0)
        return _read_only(shell > self.n_per_axis / 3.0)

    def refined(self, factor: int = 2) -> Grid:
        """The same torus with ``factor`` times more points per axis."""
        return Grid(self.dim, self.n_per_axis * factor, self.half_length)


@dataclass(frozen=True, eq=False)
class Field:
    """Real-valued function on a grid, in sample representation."""

    grid: Grid
    values: np.ndarray
    diverged: bool = False

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.size != self.grid.size:
            raise GridMismatch(
                f"{values.size} samples do not fit a grid of "
                f"{self.grid.size} points"
            )
        values = values.reshape(self.grid.shape)
        if not self.diverged and not np.all(np.isfinite(values)):
            raise DomainError("field has non-finite entries")
        object.__setattr__(self, "values", _read_only(values))

    def __repr__(self) -> str:
        return f"<Field grid={self.grid!r}>"

    @classmethod
    def zeros(cls, grid: Grid) -> Field:
        return cls(grid, np.zeros(grid.shape))

    @classmethod
    def constant(cls, grid: Grid, value: float) -> Field:
        return cls(grid, np.full(grid.shape, float(value)))

    @classmethod
    def from_function(cls, grid: Grid, func: Callable[..., np.ndarray]):
        """Sample ``func(x_1, ..., x_dim)`` on the grid."""
        values = np.broadcast_to(func(*grid.coordinates), grid.shape)
        return cls(grid, values)

    def _check_grid(self, other: Field) -> None:
        if other.grid != self.grid:
            raise GridMismatch(f"{other.grid!r} differs from {self.grid!r}")

    def __add__(self, other: Field) -> Field:
        self._check_grid(other)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: Field) -> Field:
        self._check_grid(other)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, scalar: float) -> Field:
        return Field(self.grid, float(scalar) * self.values)

    __rmul__ = __mul__

    def __neg__(self) -> Field:
        return Field(self.grid, -self.values)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Fourier coefficients of a real field, indexed by the grid lattice."""

    grid: Grid
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        coeffs = np.array(self.coeffs, dtype=np.complex128)
        if coeffs.shape != self.grid.shape:
            raise GridMismatch(
                f"coefficient shape {coeffs.shape} differs from "
                f"{self.grid.shape}"
            )
        object.__setattr__(self, "coeffs", _read_only(coeffs))

    def __repr__(self) -> str:
        return f"<SpectralField grid={self.grid!r}>"


@lru_cache(maxsize=8)
def _origin_phase(shape: tuple[int, ...]) -> np.ndarray:
    """(-1)**(k_1 + ... + k_dim) on the lattice of an array of ``shape``.

    Samples start at x = -L, so a mode e^{i xi x} read from index 0 picks up
    e^{-i pi k} per axis.
    """
    axes = [
        np.rint(np.fft.fftfreq(n, d=1.0 / n)).astype(np.int64) for n in shape
    ]
    parity = sum(np.meshgrid(*axes, indexing="ij")) % 2
    return _read_only(1.0 - 2.0 * parity)


def to_spectral(values: np.ndarray) -> np.ndarray:
    """Mean-normalized coefficients of sample values (array level)."""
    values = np.asarray(values)
    phase = _origin_phase(values.shape)
    return phase * fft_backend.fftn(values, norm="forward")


def _mode_sum(coeffs: np.ndarray) -> np.ndarray:
    coeffs = np.asarray(coeffs)
    phase = _origin_phase(coeffs.shape)
    return fft_backend.ifftn(phase * coeffs, norm="forward")


def to_physical(coeffs: np.ndarray) -> np.ndarray:
    """Real part of the mode sum of coefficients (array level)."""
    return _mode_sum(coeffs).real


def forward_transform(f: Field) -> SpectralField:
    return SpectralField(f.grid, to_spectral(f.values))


def inverse_transform(spectral: SpectralField) -> Field:
    """Sum the modes back to samples.

    :raises SymmetryViolation: if the coefficients are not Hermitian, i.e.
        the imaginary residue exceeds 1e-10 relative.
    """
    values = _mode_sum(spectral.coeffs)
    total = np.linalg.norm(values)
    if total > 0.0:
        residue = np.linalg.norm(values.imag) / total
        if residue > SYMMETRY_TOLERANCE:
            raise SymmetryViolation(
                f"imaginary residue {residue:.3e} exceeds "
                f"{SYMMETRY_TOLERANCE:.0e}; coefficients are not Hermitian"
            )
    return Field(spectral.grid, values.real)


def frequency_magnitudes(grid: Grid) -> np.ndarray:
    """|xi_k| at every lattice site, in FFT order (0 at k = 0)."""
    return grid.magnitudes.copy()


def derivative(f: Field, axis: int) -> Field:
    """Spectral partial derivative along ``axis`` (Nyquist modes dropped)."""
    grid = f.grid
    coeffs = 1j * grid.wavenumbers[axis] * to_spectral(f.values)
    coeffs[grid.nyquist_mask] = 0.0
    return Field(grid, to_physical(coeffs))


def spectral_tail_fraction(f: Field) -> float:
    """Share of the L2 energy carried by the top third of the modes."""
    power = np.abs(to_spectral(f.values)) ** 2
    total = float(power.sum())
    if total == 0.0:
        return 0.0
    return float(power[f.grid.tail_mask].sum()) / total


def _polynomial_sign(values: np.ndarray, p: float) -> int | None:
    """Sign s such that v|v|**(p-1) == s * v**p on the whole field, or None
    when the signed power is not a polynomial of the samples.
    """
    if not float(p).is_integer():
        return None
    if int(p) % 2 == 1 or np.all(values >= 0.0):
        return 1
    if np.all(values <= 0.0):
        return -1
    return None


def _padded_index(n: int, n_pad: int) -> np.ndarray:
    k = np.rint(np.fft.fftfreq(n, d=1.0 / n)).astype(np.int64)
    return k % n_pad


def _dealiased_power(
    grid: Grid, values: np.ndarray, power: int, sign: int
) -> np.ndarray:
    factor = math.ceil((power + 1) / 2)
    n_pad = factor * grid.n_per_axis
    index = np.ix_(*[_padded_index(grid.n_per_axis, n_pad)] * grid.dim)
    coeffs = to_spectral(values)
    coeffs[grid.nyquist_mask] = 0.0
    padded = np.zeros((n_pad,) * grid.dim, dtype=np.complex128)
    padded[index] = coeffs
    fine = to_physical(padded)
    result = to_spectral(sign * fine**power)[index]
    result[grid.nyquist_mask] = 0.0
    return to_physical(result)


def signed_power(grid: Grid, values: np.ndarray, p: float) -> np.ndarray:
    """Array-level v|v|**(p-1), dealiased when it is a polynomial of v."""
    if not p > 1:
        raise DomainError(f"power p must be greater than 1 (got {p})")
    sign = _polynomial_sign(values, p)
    if sign is None:
        return values * np.abs(values) ** (p - 1.0)
    return _dealiased_power(grid, values, int(p), sign)


def pointwise_power(v: Field, p: float) -> Field:
    """The nonlinearity v|v|**(p-1).

    Odd integer powers, and even integer powers of a field of constant sign,
    are polynomials of v and are formed on a grid zero-padded by a factor
    ceil((p+1)/2), then truncated back. Other powers are evaluated pointwise
    on the base grid; their aliasing error is controlled by resolution (see
    :func:`spectral_tail_fraction`).
    """
    return Field(v.grid, signed_power(v.grid, v.values, p))
