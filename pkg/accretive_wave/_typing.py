"""The internal _typing module."""
from __future__ import annotations

from typing import Any, Dict, Sequence, Tuple, Union

from accretive_wave.spectral import Field

ConfigDocument = Dict[str, Any]

ForcingHistory = Sequence[Tuple[float, Field]]

CsvValue = Union[str, int, float, bool, None]
