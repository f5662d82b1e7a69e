"""Internal compatible module."""
from __future__ import annotations

import os

try:
    import scipy.fft as fft_backend
except ImportError:
    import numpy.fft as fft_backend

__all__ = ["fft_backend", "THREADS_ENV", "worker_count"]

# To cap the number of workers used by sweeps:
# export ACCRETIVE_WAVE_THREADS=2
THREADS_ENV = "ACCRETIVE_WAVE_THREADS"


def worker_count() -> int:
    """Number of workers allowed by the environment (at least one)."""
    value = os.environ.get(THREADS_ENV, "")
    try:
        count = int(value)
    except ValueError:
        count = os.cpu_count() or 1
    return max(1, count)
