"""JSON configuration documents for the solve, sweep and verify commands.

Every problem found while reading a document raises :class:`OptionError`
whose message starts with the dotted name of the offending key.
"""
from __future__ import annotations

import copy
import json
import math
import warnings
from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable

import numpy as np

from accretive_wave._typing import ConfigDocument
from accretive_wave.admissibility import Theorem
from accretive_wave.estimates import EnsembleSpec, generate_ensemble
from accretive_wave.exception import (
    DomainError,
    FileError,
    OptionError,
    TorusWrapWarning,
)
from accretive_wave.propagators import State
from accretive_wave.solver import SolverConfig
from accretive_wave.spectral import Field, Grid

__all__ = [
    "InitialData",
    "RunConfig",
    "SweepConfig",
    "VerifyConfig",
    "load_config",
    "load_run_config",
    "load_sweep_config",
    "load_verify_config",
    "parse_run_document",
    "parse_sweep_document",
    "parse_verify_document",
    "read_document",
]

_MISSING = object()
BUMP_CUTOFF = 4.0

RUN_SECTIONS = {
    "equation",
    "grid",
    "solver",
    "initial_data",
    "overrides",
}
EQUATION_KEYS = {"p", "mu", "N", "accretion", "theorem"}
GRID_KEYS = {"n", "L"}
SOLVER_KEYS = {
    "slab_T_init",
    "slab_T_min",
    "picard_tol",
    "picard_max_iters",
    "quad_nodes_M",
    "blowup_threshold",
    "horizon",
    "record_nodes",
}
INITIAL_DATA_KEYS = {"kind", "parameters", "seed"}
INITIAL_DATA_PARAMETERS = {
    "constant": {"u", "v"},
    "mode": {"wavenumber", "u_amplitude", "v_amplitude"},
    "gaussian_bump": {"center", "width", "u_amplitude", "v_amplitude"},
    "grf": {"spectral_decay", "u_amplitude", "v_amplitude", "nonnegative"},
}
OVERRIDE_KEYS = {"ignore_admissibility"}
SWEEP_KEYS = {"p", "mu", "amplitude"}
VERIFY_SECTIONS = {"verifier", "grid", "ensemble", "seed", "parameters"}
VERIFY_GRID_KEYS = {"N", "n", "L"}
ENSEMBLE_KEYS = {"count", "spectral_decay", "nonnegative", "amplitude"}


class _Section:
    """Typed access to one JSON object, rejecting unknown keys."""

    def __init__(
        self, document: Any, path: str, allowed: set[str] | None = None
    ) -> None:
        if not isinstance(document, Mapping):
            raise OptionError(f"{path}: expected an object")
        self.document = document
        self.path = path
        if allowed is not None:
            for key in document:
                if key not in allowed:
                    raise OptionError(
                        f"{self.name(key)}: unknown key (expected one of "
                        f"{', '.join(sorted(allowed))})"
                    )

    def name(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def _value(self, key: str, default: Any) -> Any:
        if key in self.document:
            return self.document[key]
        if default is _MISSING:
            raise OptionError(f"{self.name(key)}: missing required key")
        return default

    def number(
        self,
        key: str,
        default: Any = _MISSING,
        check: Callable[[float], bool] | None = None,
        expected: str = "",
    ) -> float:
        value = self._value(key, default)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise OptionError(f"{self.name(key)}: expected a number")
        if check is not None and not check(value):
            raise OptionError(f"{self.name(key)}: must be {expected}")
        return float(value)

    def integer(
        self,
        key: str,
        default: Any = _MISSING,
        minimum: int | None = None,
    ) -> int:
        value = self._value(key, default)
        if isinstance(value, bool) or not isinstance(value, int):
            raise OptionError(f"{self.name(key)}: expected an integer")
        if minimum is not None and value < minimum:
            raise OptionError(f"{self.name(key)}: must be >= {minimum}")
        return value

    def boolean(self, key: str, default: Any = _MISSING) -> bool:
        value = self._value(key, default)
        if not isinstance(value, bool):
            raise OptionError(f"{self.name(key)}: expected true or false")
        return value

    def string(self, key: str, default: Any = _MISSING) -> str:
        value = self._value(key, default)
        if not isinstance(value, str):
            raise OptionError(f"{self.name(key)}: expected a string")
        return value

    def numbers(self, key: str) -> tuple[float, ...]:
        value = self._value(key, _MISSING)
        if not isinstance(value, list) or not value:
            raise OptionError(f"{self.name(key)}: expected a non-empty list")
        for item in value:
            if isinstance(item, bool) or not isinstance(item, (int, float)):
                raise OptionError(f"{self.name(key)}: expected numbers")
        return tuple(float(item) for item in value)

    def vector(self, key: str, dim: int, default: float) -> np.ndarray:
        """A number broadcast to ``dim`` components, or a list of them."""
        value = self._value(key, default)
        if isinstance(value, list):
            if len(value) != dim:
                raise OptionError(f"{self.name(key)}: expected {dim} values")
            items = value
        else:
            items = [value] * dim
        for item in items:
            if isinstance(item, bool) or not isinstance(item, (int, float)):
                raise OptionError(f"{self.name(key)}: expected numbers")
        return np.array(items, dtype=float)

    def section(
        self, key: str, allowed: set[str] | None, required: bool = True
    ) -> _Section:
        value = self._value(key, _MISSING if required else {})
        return _Section(value, self.name(key), allowed)


def read_document(path: str | Path) -> ConfigDocument:
    path = Path(path)
    if not path.is_file():
        raise FileError(f"configuration file not found: {path}")
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise OptionError(
            f"{path.name}: invalid JSON ({exc.msg} at line {exc.lineno})"
        ) from None
    if not isinstance(document, dict):
        raise OptionError(f"{path.name}: expected a JSON object")
    return document


def _grid(section: _Section, dim: int) -> Grid:
    n = section.integer("n", 64)
    half_length = section.number("L", math.pi)
    try:
        return Grid(dim, n, half_length)
    except DomainError as exc:
        raise OptionError(f"{section.path}: {exc}") from None


@dataclass(frozen=True)
class InitialData:
    """Initial state recipe: one of constant, mode, gaussian_bump, grf."""

    kind: str
    parameters: dict[str, Any] = field(default_factory=dict)
    seed: int = 0

    def build(
        self, grid: Grid, horizon: float = 0.0, amplitude: float = 1.0
    ) -> State:
        section = _Section(
            self.parameters,
            "initial_data.parameters",
            INITIAL_DATA_PARAMETERS[self.kind],
        )
        builder = getattr(self, f"_build_{self.kind}")
        u, v = builder(section, grid, horizon)
        return State(amplitude * u, amplitude * v)

    def _build_constant(
        self, section: _Section, grid: Grid, horizon: float
    ) -> tuple[Field, Field]:
        return (
            Field.constant(grid, section.number("u", 0.0)),
            Field.constant(grid, section.number("v", 0.0)),
        )

    def _build_mode(
        self, section: _Section, grid: Grid, horizon: float
    ) -> tuple[Field, Field]:
        value = section._value("wavenumber", 1)
        if isinstance(value, int) and not isinstance(value, bool):
            wavenumber = [value] + [0] * (grid.dim - 1)
        elif isinstance(value, list) and len(value) == grid.dim:
            wavenumber = value
        else:
            raise OptionError(
                f"{section.name('wavenumber')}: expected an integer or "
                f"{grid.dim} integers"
            )
        if any(
            isinstance(k, bool) or not isinstance(k, int) for k in wavenumber
        ):
            raise OptionError(f"{section.name('wavenumber')}: not integers")
        scale = math.pi / grid.half_length
        phase = sum(
            scale * k * x for k, x in zip(wavenumber, grid.coordinates)
        )
        profile = Field(grid, np.cos(phase))
        return (
            section.number("u_amplitude", 1.0) * profile,
            section.number("v_amplitude", 0.0) * profile,
        )

    def _build_gaussian_bump(
        self, section: _Section, grid: Grid, horizon: float
    ) -> tuple[Field, Field]:
        center = section.vector("center", grid.dim, 0.0)
        width = section.number(
            "width", 0.5, lambda w: w > 0, "a positive number"
        )
        reach = float(np.max(np.abs(center))) + BUMP_CUTOFF * width + horizon
        if reach > grid.half_length:
            warnings.warn(
                f"bump support plus horizon reaches {reach:.6g} beyond the "
                f"half-length {grid.half_length:.6g}; waves wrap around "
                "the torus",
                TorusWrapWarning,
                stacklevel=3,
            )
        squared = sum(
            (x - c) ** 2 for x, c in zip(grid.coordinates, center)
        )
        profile = Field(grid, np.exp(-squared / width**2))
        return (
            section.number("u_amplitude", 1.0) * profile,
            section.number("v_amplitude", 0.0) * profile,
        )

    def _build_grf(
        self, section: _Section, grid: Grid, horizon: float
    ) -> tuple[Field, Field]:
        spec = EnsembleSpec(
            grid,
            1,
            section.number("spectral_decay", 2.0),
            seed=self.seed,
            nonnegative=section.boolean("nonnegative", False),
        )
        u_amplitude = section.number("u_amplitude", 1.0)
        v_amplitude = section.number("v_amplitude", 1.0)
        u = generate_ensemble(spec.replace(amplitude=u_amplitude))[0]
        v = generate_ensemble(
            spec.replace(seed=self.seed + 1, amplitude=v_amplitude)
        )[0]
        return u, v


@dataclass(frozen=True)
class RunConfig:
    solver: SolverConfig
    initial_data: InitialData
    document: ConfigDocument

    @property
    def seed(self) -> int:
        return self.initial_data.seed

    def initial_state(self, amplitude: float = 1.0) -> State:
        return self.initial_data.build(
            self.solver.grid, self.solver.horizon, amplitude
        )


@dataclass(frozen=True)
class SweepConfig:
    base: RunConfig
    p: tuple[float, ...]
    mu: tuple[float, ...]
    amplitude: tuple[float, ...]
    document: ConfigDocument

    def cells(self) -> list[tuple[int, float, float, float]]:
        """(index, p, mu, amplitude) in row-major order."""
        cells = []
        for p in self.p:
            for mu in self.mu:
                for amplitude in self.amplitude:
                    cells.append((len(cells), p, mu, amplitude))
        return cells

    def solver_for(self, p: float, mu: float) -> SolverConfig:
        return replace(self.base.solver, p=p, mu=mu)


@dataclass(frozen=True)
class VerifyConfig:
    verifier: str | None
    spec: EnsembleSpec
    parameters: dict[str, Any]
    document: ConfigDocument

    @property
    def seed(self) -> int:
        return self.spec.seed


def _with_seed(
    document: ConfigDocument, seed: int | None, *keys: str
) -> ConfigDocument:
    document = copy.deepcopy(document)
    if seed is not None:
        target = document
        for key in keys[:-1]:
            target = target.setdefault(key, {})
            if not isinstance(target, dict):
                break
        else:
            target[keys[-1]] = seed
    return document


def _parse_run(root: _Section, document: ConfigDocument) -> RunConfig:
    equation = root.section("equation", EQUATION_KEYS)
    dim = equation.integer("N", 1, minimum=1)
    if dim > 3:
        raise OptionError(f"equation.N: must be 1, 2 or 3 (got {dim})")
    theorem_value = equation._value("theorem", None)
    if theorem_value not in (None, 1, 2) or isinstance(theorem_value, bool):
        raise OptionError("equation.theorem: expected 1, 2 or null")
    grid = _grid(root.section("grid", GRID_KEYS, required=False), dim)
    solver = root.section("solver", SOLVER_KEYS)
    overrides = root.section("overrides", OVERRIDE_KEYS, required=False)
    horizon = solver.number("horizon")
    solver_config = SolverConfig(
        p=equation.number("p"),
        mu=equation.number("mu", 1.0),
        grid=grid,
        slab_T_init=solver.number("slab_T_init", min(0.1, horizon)),
        slab_T_min=solver.number("slab_T_min", 1e-10),
        horizon=horizon,
        picard_tol=solver.number("picard_tol", 1e-10),
        picard_max_iters=solver.integer("picard_max_iters", 50),
        quad_nodes_M=solver.integer("quad_nodes_M", 17),
        blowup_threshold=solver.number("blowup_threshold", 1e8),
        accretion=equation.number("accretion", 1.0),
        theorem=None if theorem_value is None else Theorem(theorem_value),
        ignore_admissibility=overrides.boolean(
            "ignore_admissibility", False
        ),
        record_nodes=solver.boolean("record_nodes", True),
    )
    data = root.section("initial_data", INITIAL_DATA_KEYS)
    kind = data.string("kind")
    if kind not in INITIAL_DATA_PARAMETERS:
        raise OptionError(
            f"initial_data.kind: unknown kind {kind!r} (expected one of "
            f"{', '.join(INITIAL_DATA_PARAMETERS)})"
        )
    parameters = data.section("parameters", None, required=False)
    initial = InitialData(
        kind, dict(parameters.document), data.integer("seed", 0, minimum=0)
    )
    config = RunConfig(solver_config, initial, document)
    # surfaces parameter errors at load time
    config.initial_state()
    return config


def parse_run_document(
    document: ConfigDocument, seed: int | None = None
) -> RunConfig:
    document = _with_seed(document, seed, "initial_data", "seed")
    return _parse_run(_Section(document, "", RUN_SECTIONS), document)


def parse_sweep_document(
    document: ConfigDocument, seed: int | None = None
) -> SweepConfig:
    document = _with_seed(document, seed, "initial_data", "seed")
    root = _Section(document, "", RUN_SECTIONS | {"sweep"})
    sweep = root.section("sweep", SWEEP_KEYS)
    p_values = sweep.numbers("p")
    mu_values = sweep.numbers("mu")
    amplitudes = sweep.numbers("amplitude")
    base_document = {k: v for k, v in document.items() if k != "sweep"}
    equation = dict(base_document.get("equation") or {})
    equation.setdefault("p", p_values[0])
    equation.setdefault("mu", mu_values[0])
    base_document["equation"] = equation
    base = _parse_run(
        _Section(base_document, "", RUN_SECTIONS), base_document
    )
    return SweepConfig(base, p_values, mu_values, amplitudes, document)


def parse_verify_document(
    document: ConfigDocument, seed: int | None = None
) -> VerifyConfig:
    document = _with_seed(document, seed, "seed")
    root = _Section(document, "", VERIFY_SECTIONS)
    grid_section = root.section("grid", VERIFY_GRID_KEYS, required=False)
    dim = grid_section.integer("N", 1, minimum=1)
    if dim > 3:
        raise OptionError(f"grid.N: must be 1, 2 or 3 (got {dim})")
    grid = _grid(
        _Section(
            {k: v for k, v in grid_section.document.items() if k != "N"},
            "grid",
        ),
        dim,
    )
    ensemble = root.section("ensemble", ENSEMBLE_KEYS, required=False)
    spec = EnsembleSpec(
        grid,
        ensemble.integer("count", 50, minimum=1),
        ensemble.number("spectral_decay", 2.0),
        seed=root.integer("seed", 0, minimum=0),
        nonnegative=ensemble.boolean("nonnegative", False),
        amplitude=ensemble.number("amplitude", 1.0),
    )
    verifier = None
    if "verifier" in document:
        verifier = root.string("verifier")
    parameters = root.section("parameters", None, required=False)
    return VerifyConfig(verifier, spec, dict(parameters.document), document)


def load_run_config(path: str | Path, seed: int | None = None) -> RunConfig:
    return parse_run_document(read_document(path), seed)


def load_sweep_config(
    path: str | Path, seed: int | None = None
) -> SweepConfig:
    return parse_sweep_document(read_document(path), seed)


def load_verify_config(
    path: str | Path, seed: int | None = None
) -> VerifyConfig:
    return parse_verify_document(read_document(path), seed)


LOADERS: dict[str, Callable[..., Any]] = {
    "run": load_run_config,
    "sweep": load_sweep_config,
    "verify": load_verify_config,
}


def load_config(
    path: str | Path, kind: str = "run", seed: int | None = None
) -> RunConfig | SweepConfig | VerifyConfig:
    """Read the configuration of a ``run``, ``sweep`` or ``verify``."""
    try:
        loader = LOADERS[kind]
    except KeyError:
        raise OptionError(f"unknown configuration kind {kind!r}") from None
    return loader(path, seed)
