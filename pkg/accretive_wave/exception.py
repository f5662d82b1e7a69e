"""Internal exception and warning classes."""
from __future__ import annotations

from setuptools.errors import FileError as _FileError
from setuptools.errors import OptionError as _OptionError

__all__ = [
    "AccretiveWaveError",
    "AdmissibilityWarning",
    "DomainError",
    "ExponentMismatch",
    "FileError",
    "GridMismatch",
    "MeanNotZero",
    "NonContraction",
    "NotAdmissible",
    "OptionError",
    "QuadratureError",
    "ResolutionWarning",
    "SymmetryViolation",
    "TorusWrapWarning",
    "UnsupportedDim",
]


class FileError(_FileError):
    """Raised when an error is detected related to file/resource not found."""


class OptionError(_OptionError):
    """Raised when an error is detected in the configuration.
    The associated value is a string indicating what precisely went wrong,
    starting with the dotted name of the offending key when there is one.
    """


class AccretiveWaveError(Exception):
    """Base class for the numerical errors of the package."""


class DomainError(AccretiveWaveError, ValueError):
    """Raised when a parameter lies outside the domain of an operation."""


class SymmetryViolation(AccretiveWaveError):
    """Raised when coefficients do not describe a real-valued field."""


class UnsupportedDim(AccretiveWaveError):
    """Raised when an operation is not available in the grid dimension."""


class MeanNotZero(AccretiveWaveError):
    """Raised when a negative-order homogeneous seminorm meets a field with
    nonzero mean.
    """


class QuadratureError(AccretiveWaveError):
    """Raised when quadrature nodes are not a uniform odd partition."""


class GridMismatch(AccretiveWaveError):
    """Raised when fields living on different grids are combined."""


class ExponentMismatch(AccretiveWaveError):
    """Raised when the Gagliardo-Nirenberg scaling relation fails."""


class NotAdmissible(AccretiveWaveError):
    """Raised when a solve is requested outside the admissible parameter
    range and the override flag is not set.
    """


class NonContraction(AccretiveWaveError):
    """Raised when the Picard iteration on a slab fails to contract."""

    def __init__(self, message: str, iterations: int, ratios: list[float]):
        super().__init__(message)
        self.iterations: int = iterations
        self.ratios: list[float] = ratios


class ResolutionWarning(UserWarning):
    """The spectral tail of the solution carries more than 1% of its
    energy; aliasing makes further continuation unreliable.
    """


class TorusWrapWarning(UserWarning):
    """Support of the data plus the horizon does not fit in the torus."""


class AdmissibilityWarning(UserWarning):
    """A solve runs outside the admissible range behind the override flag."""
