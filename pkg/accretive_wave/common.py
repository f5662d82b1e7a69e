"""Common utility functions shared between accretive_wave modules."""
from __future__ import annotations

import hashlib
import json
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

from accretive_wave._typing import ConfigDocument, CsvValue
from accretive_wave.exception import FileError

__all__ = [
    "canonical_json",
    "config_hash",
    "csv_value",
    "file_digest",
    "format_float",
    "timestamp",
]


def format_float(value: float) -> str:
    """Decimal text with 17 significant digits, which round-trips any
    double; non-finite values are spelled inf, -inf and nan.
    """
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.17g}"


def csv_value(value: Any) -> CsvValue:
    """Normalize a value for a CSV cell."""
    if hasattr(value, "item"):  # numpy scalar
        value = value.item()
    if isinstance(value, float):
        return format_float(value)
    if value is None or isinstance(value, (bool, int, str)):
        return value
    return str(value)


def _json_default(value: Any) -> Any:
    if hasattr(value, "item"):
        return value.item()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def canonical_json(document: Any) -> str:
    """Key-sorted, whitespace-free JSON text; non-finite floats are
    written as strings so that the text stays strict JSON.
    """

    def scrub(value: Any) -> Any:
        if isinstance(value, float) and not math.isfinite(value):
            return format_float(value)
        if isinstance(value, dict):
            return {str(key): scrub(item) for key, item in value.items()}
        if isinstance(value, (list, tuple)):
            return [scrub(item) for item in value]
        return value

    return json.dumps(
        scrub(document),
        sort_keys=True,
        separators=(",", ":"),
        default=_json_default,
    )


def config_hash(document: ConfigDocument) -> str:
    """SHA-256 hex digest of the canonical form of a configuration."""
    return hashlib.sha256(canonical_json(document).encode("utf-8")).hexdigest()


def file_digest(path: str | Path) -> str:
    path = Path(path)
    if not path.is_file():
        raise FileError(f"cannot digest missing file {path}")
    return hashlib.sha256(path.read_bytes()).hexdigest()


def timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")
