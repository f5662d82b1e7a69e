"""Tests for accretive_wave.config."""
from __future__ import annotations

import math
from pathlib import Path

import numpy as np
import pytest
from generate_samples import (
    GRF_SWEEP,
    ZERO_DATA,
    create_config,
    with_changes,
)
from numpy.testing import assert_allclose

from accretive_wave.common import config_hash
from accretive_wave.config import (
    load_config,
    load_run_config,
    load_sweep_config,
    parse_run_document,
    parse_sweep_document,
    parse_verify_document,
)
from accretive_wave.exception import (
    FileError,
    OptionError,
    TorusWrapWarning,
)

FIXTURE_DIR = Path(__file__).resolve().parent


@pytest.mark.datafiles(FIXTURE_DIR.parent / "samples" / "blowup_p2")
def test_load_blowup_sample(datafiles: Path):
    """Test the blowup_p2 sample."""
    config = load_run_config(datafiles / "config.json")
    solver = config.solver
    assert (solver.p, solver.mu) == (2.0, 1.0)
    assert solver.grid.n_per_axis == 64
    assert solver.grid.half_length == pytest.approx(math.pi)
    assert solver.blowup_threshold == 1e6
    state = config.initial_state()
    assert_allclose(state.u.values, 0.0)
    assert_allclose(state.v.values, 1.0)


@pytest.mark.datafiles(FIXTURE_DIR.parent / "samples" / "bump_2d")
def test_load_bump_sample(datafiles: Path):
    """Test the bump_2d sample: a 2-D Gaussian centered at the origin."""
    config = load_config(datafiles / "config.json")
    state = config.initial_state()
    assert state.u.values.shape == (32, 32)
    assert state.u.values.max() == pytest.approx(0.01)
    assert_allclose(state.v.values, 0.0)


def test_defaults_are_filled_in():
    config = parse_run_document(ZERO_DATA)
    solver = config.solver
    assert solver.quad_nodes_M == 17
    assert solver.picard_max_iters == 50
    assert solver.accretion == 1.0
    assert solver.theorem is None
    assert not solver.ignore_admissibility
    assert solver.grid.half_length == pytest.approx(math.pi)


@pytest.mark.parametrize(
    ("sections", "key"),
    [
        ({"solver": {"horizon": 1.0, "bogus": 1}}, "solver.bogus"),
        ({"solver": {"slab_T_init": 0.25}}, "solver.horizon"),
        ({"equation": {"mu": 1}}, "equation.p"),
        ({"equation": {"p": "two"}}, "equation.p"),
        ({"equation": {"p": 2, "N": 4}}, "equation.N"),
        ({"equation": {"p": 2, "theorem": 3}}, "equation.theorem"),
        ({"grid": {"n": 31}}, "grid"),
        ({"solver": {"horizon": 1.0, "slab_T_init": 2.0}}, "solver.slab_T"),
        ({"overrides": {"ignore_admissibility": 1}}, "overrides.ignore"),
        ({"initial_data": {"kind": "spline"}}, "initial_data.kind"),
        ({"initial_data": None}, "initial_data"),
        ({"extra": {}}, "extra"),
    ],
)
def test_errors_name_the_key(sections, key):
    """Test that every malformed document reports the offending key."""
    document = with_changes(ZERO_DATA, **sections)
    with pytest.raises(OptionError, match=key.replace(".", r"\.")):
        parse_run_document(document)


def test_initial_data_parameters_are_checked_at_load():
    data = {"kind": "constant", "parameters": {"u": 0, "w": 1}}
    document = with_changes(ZERO_DATA, initial_data=data)
    with pytest.raises(OptionError, match=r"initial_data\.parameters\.w"):
        parse_run_document(document)


def test_invalid_json(tmp_path: Path):
    path = create_config(tmp_path, '{"equation": {"p": 2,}}')
    with pytest.raises(OptionError, match="config.json: invalid JSON"):
        load_run_config(path)


def test_missing_file(tmp_path: Path):
    with pytest.raises(FileError):
        load_run_config(tmp_path / "missing.json")


def test_top_level_must_be_an_object(tmp_path: Path):
    path = create_config(tmp_path, [1, 2, 3])
    with pytest.raises(OptionError, match="expected a JSON object"):
        load_run_config(path)


def test_seed_override_changes_the_hash(tmp_path: Path):
    path = create_config(tmp_path, GRF_SWEEP)
    plain = load_sweep_config(path)
    seeded = load_sweep_config(path, seed=12)
    assert plain.base.seed == 11
    assert seeded.base.seed == 12
    assert config_hash(plain.document) != config_hash(seeded.document)
    # the file itself is untouched
    assert load_sweep_config(path).document == plain.document


def test_mode_initial_data():
    data = {
        "kind": "mode",
        "parameters": {"wavenumber": 2, "u_amplitude": 0.5},
    }
    config = parse_run_document(with_changes(ZERO_DATA, initial_data=data))
    x = config.solver.grid.coordinates[0]
    state = config.initial_state()
    assert_allclose(state.u.values, 0.5 * np.cos(2 * x), atol=1e-15)
    assert_allclose(state.v.values, 0.0)


def test_mode_wavenumber_must_match_dimension():
    data = {"kind": "mode", "parameters": {"wavenumber": [1, 2]}}
    document = with_changes(ZERO_DATA, initial_data=data)
    with pytest.raises(OptionError, match="wavenumber"):
        parse_run_document(document)


def test_amplitude_scales_the_state():
    config = parse_run_document(
        with_changes(GRF_SWEEP, sweep=None, equation={"p": 2})
    )
    base = config.initial_state()
    scaled = config.initial_state(0.25)
    assert_allclose(scaled.u.values, 0.25 * base.u.values)
    assert_allclose(scaled.v.values, 0.25 * base.v.values)


def test_grf_data_depends_on_the_seed():
    document = with_changes(GRF_SWEEP, sweep=None, equation={"p": 2})
    first = parse_run_document(document).initial_state()
    again = parse_run_document(document).initial_state()
    other = parse_run_document(document, seed=3).initial_state()
    assert_allclose(first.u.values, again.u.values)
    assert not np.allclose(first.u.values, other.u.values)
    assert not np.allclose(first.u.values, first.v.values)


def test_bump_wrapping_warns():
    """Test a bump whose support plus the horizon exceeds the box."""
    data = {"kind": "gaussian_bump", "parameters": {"width": 0.5}}
    solver = {"slab_T_init": 0.25, "horizon": 2.0}
    document = with_changes(ZERO_DATA, initial_data=data, solver=solver)
    with pytest.warns(TorusWrapWarning):
        parse_run_document(document)


def test_sweep_cells():
    config = parse_sweep_document(GRF_SWEEP)
    assert config.cells() == [
        (0, 2.0, 1.5, 0.001),
        (1, 2.0, 2.0, 0.001),
        (2, 3.0, 1.5, 0.001),
        (3, 3.0, 2.0, 0.001),
    ]
    assert config.solver_for(3.0, 2.0).p == 3.0
    assert config.base.solver.p == 2.0


@pytest.mark.parametrize(
    ("sweep", "key"),
    [
        ({"p": [], "mu": [1.5], "amplitude": [1]}, "sweep.p"),
        ({"p": [2], "mu": [1.5]}, "sweep.amplitude"),
        ({"p": [2], "mu": ["x"], "amplitude": [1]}, "sweep.mu"),
    ],
)
def test_sweep_errors(sweep, key):
    with pytest.raises(OptionError, match=key.replace(".", r"\.")):
        parse_sweep_document(with_changes(GRF_SWEEP, sweep=sweep))


def test_verify_defaults():
    config = parse_verify_document({})
    assert config.verifier is None
    assert config.spec.count == 50
    assert config.spec.spectral_decay == 2.0
    assert config.spec.grid.dim == 1
    assert config.seed == 0
    assert parse_verify_document({}, seed=5).seed == 5


@pytest.mark.datafiles(FIXTURE_DIR.parent / "samples" / "verify_kernel")
def test_load_verify_sample(datafiles: Path):
    """Test the verify_kernel sample."""
    config = load_config(datafiles / "config.json", "verify")
    assert config.verifier == "kernel_linf"
    assert config.spec.count == 100
    assert config.seed == 7
    assert config.parameters == {"times": [0.25, 1.0, 4.0]}


def test_verify_grid_errors():
    with pytest.raises(OptionError, match=r"grid\.N"):
        parse_verify_document({"grid": {"N": 5}})
    with pytest.raises(OptionError, match=r"ensemble\.count"):
        parse_verify_document({"ensemble": {"count": 0}})


def test_unknown_configuration_kind(tmp_path: Path):
    path = create_config(tmp_path, ZERO_DATA)
    with pytest.raises(OptionError, match="unknown configuration kind"):
        load_config(path, "plot")
