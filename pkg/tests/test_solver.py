"""Tests for accretive_wave.solver."""
from __future__ import annotations

import itertools
import math
from dataclasses import replace

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import simpson

from accretive_wave.estimates import EnsembleSpec, generate_ensemble
from accretive_wave.exception import (
    AdmissibilityWarning,
    DomainError,
    NonContraction,
    NotAdmissible,
    OptionError,
    ResolutionWarning,
)
from accretive_wave.norms import phase_norm
from accretive_wave.propagators import State
from accretive_wave.solver import (
    UNDERFLOW_GROWTH,
    Outcome,
    SolverConfig,
    TimeSlab,
    _SlabKernel,
    continue_to_tmax,
    continuity_profile,
    energy_source,
    phi_map,
    picard_solve_slab,
    suggest_slab_T,
)
from accretive_wave.spectral import Field, Grid

GRID_1D = Grid(1, 64, math.pi)


def _config(**changes) -> SolverConfig:
    options = {
        "p": 2.0,
        "mu": 1.0,
        "grid": GRID_1D,
        "slab_T_init": 0.05,
        "slab_T_min": 1e-12,
        "horizon": 2.0,
        "blowup_threshold": 1e6,
    }
    options.update(changes)
    return SolverConfig(**options)


def _constant_state(grid: Grid, u: float, v: float) -> State:
    return State(Field.constant(grid, u), Field.constant(grid, v))


def _small_state(seed: int, size: float = 1e-3) -> State:
    spec = EnsembleSpec(GRID_1D, 1, 3.0, seed=seed)
    u = generate_ensemble(spec)[0]
    v = generate_ensemble(spec.replace(seed=seed + 1000))[0]
    state = State(u, v)
    scale = size / phase_norm(state, 1.0).total
    return State(scale * u, scale * v)


@pytest.mark.timeout(60)
@pytest.mark.parametrize(
    ("p", "mu", "blowup_time"), [(2.0, 1.0, 1.0), (3.0, 1.5, 0.5)]
)
def test_constant_data_blow_up(p, mu, blowup_time):
    """Test T* = v0^(1-p) / (p-1) for spatially constant data v0 = 1 at the
    default blow-up threshold.
    """
    cfg = _config(p=p, mu=mu, blowup_threshold=1e8)
    trajectory = continue_to_tmax(_constant_state(GRID_1D, 0.0, 1.0), cfg)
    assert trajectory.outcome is Outcome.BLOWUP_DETECTED
    assert trajectory.tmax_estimate == pytest.approx(blowup_time, rel=0.02)
    assert trajectory.final_time == trajectory.tmax_estimate
    totals = trajectory.phase_totals
    assert totals[-1] > UNDERFLOW_GROWTH * totals[0]
    assert np.all(np.diff(trajectory.times) > 0.0)


def test_constant_data_follows_the_ode():
    """Test v(t) = 1 / (1 - t) for p = 2 to 1e-6 before 0.9 T*."""
    cfg = _config(horizon=0.85)
    trajectory = continue_to_tmax(_constant_state(GRID_1D, 0.0, 1.0), cfg)
    assert trajectory.outcome is Outcome.REACHED_HORIZON
    for snapshot in trajectory.snapshots[::20]:
        expected = 1.0 / (1.0 - snapshot.t)
        assert_allclose(snapshot.state.v.values, expected, rtol=1e-6)
        assert_allclose(
            snapshot.state.u.values, -math.log(1.0 - snapshot.t), rtol=1e-6
        )


def test_energy_law_in_integral_form():
    """Test E(t) - E(0) = integral of a * |v|^(p+1) to 1e-4 relative."""
    cfg = _config(horizon=0.5)
    initial = State(
        Field.from_function(GRID_1D, lambda x: 0.3 * np.cos(x)),
        Field.from_function(GRID_1D, lambda x: 0.8 + 0.1 * np.sin(x)),
    )
    trajectory = continue_to_tmax(initial, cfg)
    times = trajectory.times
    sources = [
        energy_source(snapshot.state, cfg.p, cfg.accretion)
        for snapshot in trajectory.snapshots
    ]
    gain = trajectory.snapshots[-1].energy - trajectory.snapshots[0].energy
    assert gain > 0.0
    assert simpson(sources, x=times) == pytest.approx(gain, rel=1e-4)


def test_energy_source_of_constant_velocity():
    state = _constant_state(GRID_1D, 0.0, 2.0)
    assert energy_source(state, 2.0) == pytest.approx(16 * math.pi)
    assert energy_source(state, 2.0, -0.5) == pytest.approx(-8 * math.pi)


def test_zero_data_stays_zero():
    cfg = _config(horizon=1.0, slab_T_init=0.25)
    trajectory = continue_to_tmax(State.zeros(GRID_1D), cfg)
    assert trajectory.outcome is Outcome.REACHED_HORIZON
    assert trajectory.final_time == pytest.approx(1.0)
    assert math.isinf(trajectory.tmax_estimate)
    assert np.all(trajectory.phase_totals == 0.0)


def test_damped_equation_decays():
    """Test v' = -v^2, i.e. v(1) = 1/2, when the accretion sign flips."""
    cfg = _config(horizon=1.0, accretion=-1.0)
    trajectory = continue_to_tmax(_constant_state(GRID_1D, 0.0, 1.0), cfg)
    assert trajectory.outcome is Outcome.REACHED_HORIZON
    assert_allclose(trajectory.snapshots[-1].state.v.values, 0.5, rtol=1e-6)


def test_small_data_contracts():
    """Test ratios below 0.9 and convergence within 15 iterations."""
    cfg = _config(slab_T_init=0.25, picard_tol=1e-14)
    for seed in range(5):
        _, iterations, ratios = picard_solve_slab(
            _small_state(seed), 0.0, 0.25, cfg
        )
        assert iterations <= 15
        assert ratios
        assert all(ratio < 0.9 for ratio in ratios)


def test_shorter_slabs_contract_faster():
    """Test that halving T lowers the first ratio over 20 seeds."""
    cfg = _config(slab_T_init=0.25, picard_tol=1e-14)
    full, half = [], []
    for seed in range(20):
        initial = _small_state(seed)
        full.append(picard_solve_slab(initial, 0.0, 0.25, cfg)[2][0])
        half.append(picard_solve_slab(initial, 0.0, 0.125, cfg)[2][0])
    assert np.mean(half) < np.mean(full)


def test_restart_consistency():
    """Test that two slabs of length T reproduce one slab of length 2T."""
    cfg = _config(slab_T_init=0.25, picard_tol=1e-14)
    initial = _small_state(3)
    first, _, _ = picard_solve_slab(initial, 0.0, 0.25, cfg)
    second, _, _ = picard_solve_slab(first.end, 0.25, 0.25, cfg)
    whole, _, _ = picard_solve_slab(initial, 0.0, 0.5, cfg)
    assert second.times[-1] == pytest.approx(0.5)
    difference = phase_norm(second.end - whole.end, cfg.mu).total
    assert difference < 1e-7


def test_phi_map_fixes_the_solution():
    cfg = _config(slab_T_init=0.25, picard_tol=1e-14)
    initial = _small_state(4)
    slab, _, _ = picard_solve_slab(initial, 0.0, 0.25, cfg)
    image = phi_map(slab, initial, cfg)
    for node, mapped in zip(slab.nodes, image.nodes):
        assert_allclose(mapped.u.values, node.u.values, atol=1e-13)
        assert_allclose(mapped.v.values, node.v.values, atol=1e-13)


@pytest.mark.timeout(120)
def test_blow_up_time_does_not_depend_on_the_slab():
    """Test that halving slab_T_init moves T_max by less than 1%."""
    initial = _constant_state(GRID_1D, 0.0, 1.0)
    coarse = continue_to_tmax(initial, _config(slab_T_init=0.1))
    fine = continue_to_tmax(initial, _config(slab_T_init=0.05))
    assert coarse.outcome is Outcome.BLOWUP_DETECTED
    assert fine.outcome is Outcome.BLOWUP_DETECTED
    assert coarse.tmax_estimate == pytest.approx(fine.tmax_estimate, rel=0.01)


def test_slab_underflow_after_growth_is_blow_up(mocker):
    """Test that slabs shrinking after the phase norm grew 5000-fold end as
    blow-up at the last completed time.
    """
    count = 17
    u = np.zeros((count, GRID_1D.n_per_axis), dtype=complex)
    v = np.zeros_like(u)
    v[:, 0] = np.linspace(1.0, 5e3, count)
    failure = NonContraction("no contraction", 3, [1.0, 1.0, 1.0])
    mocker.patch(
        "accretive_wave.solver._iterate",
        side_effect=itertools.chain(
            [(u, v, 4, [0.1])], itertools.repeat(failure)
        ),
    )
    cfg = _config(slab_T_init=0.1, slab_T_min=1e-3, quad_nodes_M=count)
    trajectory = continue_to_tmax(_constant_state(GRID_1D, 0.0, 1.0), cfg)
    assert trajectory.outcome is Outcome.BLOWUP_DETECTED
    assert trajectory.tmax_estimate == pytest.approx(0.1)
    assert trajectory.final_time == trajectory.tmax_estimate
    assert trajectory.phase_totals[-1] < cfg.blowup_threshold


def test_fixed_point_residual():
    """Test that the converged slab is a fixed point to 10 picard_tol."""
    cfg = _config(slab_T_init=0.25, picard_tol=1e-10)
    for seed in range(3):
        initial = _small_state(seed)
        slab, _, _ = picard_solve_slab(initial, 0.0, 0.25, cfg)
        image = phi_map(slab, initial, cfg)
        residual = max(
            phase_norm(mapped - node, cfg.mu).total
            for mapped, node in zip(image.nodes, slab.nodes)
        )
        assert residual < 10 * cfg.picard_tol


def test_phi_map_of_constant_velocity():
    """Test one map of the guess v = 1 for p = 2: v(tau) = 1 + tau and
    u(tau) = tau + tau^2 / 2.
    """
    T, count = 0.2, 9
    taus = np.linspace(0.0, T, count)
    guess = tuple(_constant_state(GRID_1D, tau, 1.0) for tau in taus)
    initial = _constant_state(GRID_1D, 0.0, 1.0)
    image = phi_map(TimeSlab(0.0, T, guess), initial, _config())
    for tau, node in zip(taus, image.nodes):
        assert_allclose(node.v.values, 1.0 + tau, rtol=1e-12)
        assert_allclose(node.u.values, tau + tau**2 / 2, atol=1e-12)


def test_phi_map_needs_odd_nodes():
    initial = State.zeros(GRID_1D)
    with pytest.raises(DomainError):
        phi_map(TimeSlab(0.0, 0.1, (initial, initial)), initial, _config())


def test_slab_below_minimum():
    cfg = _config(slab_T_min=1e-3)
    with pytest.raises(DomainError):
        picard_solve_slab(State.zeros(GRID_1D), 0.0, 1e-4, cfg)


def test_slab_underflow_is_not_blow_up(mocker):
    """Test that a slab that never contracts ends as SlabUnderflow."""
    mocker.patch(
        "accretive_wave.solver._iterate",
        side_effect=NonContraction("no contraction", 3, [1.0, 1.0, 1.0]),
    )
    cfg = _config(slab_T_init=0.1, slab_T_min=1e-3)
    trajectory = continue_to_tmax(State.zeros(GRID_1D), cfg)
    assert trajectory.outcome is Outcome.SLAB_UNDERFLOW
    assert math.isinf(trajectory.tmax_estimate)
    assert trajectory.final_time == 0.0


def test_not_admissible_without_override():
    cfg = _config(p=3.0, mu=1.0)
    with pytest.raises(NotAdmissible, match="outside"):
        continue_to_tmax(State.zeros(GRID_1D), cfg)


def test_override_warns_and_runs():
    cfg = _config(p=3.0, mu=1.0, horizon=0.2, ignore_admissibility=True)
    with pytest.warns(AdmissibilityWarning):
        trajectory = continue_to_tmax(State.zeros(GRID_1D), cfg)
    assert trajectory.admissibility_overridden
    assert not trajectory.decision.admissible
    assert trajectory.outcome is Outcome.REACHED_HORIZON


def test_threshold_must_exceed_initial_norm():
    cfg = _config(blowup_threshold=1.0)
    with pytest.raises(OptionError, match="blowup_threshold"):
        continue_to_tmax(_constant_state(GRID_1D, 0.0, 1.0), cfg)


def test_resolution_warning():
    cfg = _config(p=3.0, mu=1.5, horizon=0.1, slab_T_init=0.1)
    rough = Field.from_function(GRID_1D, lambda x: 1e-3 * np.cos(30 * x))
    with pytest.warns(ResolutionWarning):
        trajectory = continue_to_tmax(State(rough, rough), cfg)
    assert trajectory.resolution_warning


def test_record_only_slab_ends():
    cfg = _config(horizon=1.0, slab_T_init=0.25, record_nodes=False)
    trajectory = continue_to_tmax(State.zeros(GRID_1D), cfg)
    assert_allclose(trajectory.times, [0.0, 0.25, 0.5, 0.75, 1.0])


@pytest.mark.parametrize(
    ("changes", "key"),
    [
        ({"p": 1.0}, "equation.p"),
        ({"mu": 0.5}, "equation.mu"),
        ({"accretion": math.nan}, "equation.accretion"),
        ({"horizon": 0.0}, "solver.horizon"),
        ({"slab_T_min": 0.0}, "solver.slab_T_min"),
        ({"slab_T_init": 3.0}, "solver.slab_T_init"),
        ({"picard_tol": 0.0}, "solver.picard_tol"),
        ({"picard_max_iters": 0}, "solver.picard_max_iters"),
        ({"quad_nodes_M": 16}, "solver.quad_nodes_M"),
        ({"quad_nodes_M": 1}, "solver.quad_nodes_M"),
        ({"blowup_threshold": -1.0}, "solver.blowup_threshold"),
    ],
)
def test_config_validation_names_the_key(changes, key):
    with pytest.raises(OptionError, match=key.replace(".", r"\.")):
        _config(**changes)


def test_config_is_frozen():
    cfg = _config()
    assert replace(cfg, p=3.0).p == 3.0
    with pytest.raises(AttributeError):
        cfg.p = 3.0


def test_suggest_slab_T():
    assert suggest_slab_T(1.0, 1.0, 0.5) == pytest.approx(1 / 32)
    assert suggest_slab_T(0.0, 1.0, 1.0, c_emp=4.0) == pytest.approx(0.125)
    with pytest.raises(DomainError):
        suggest_slab_T(1.0, 1.0, 0.0)


def test_continuity_profile():
    cfg = _config(horizon=0.5)
    trajectory = continue_to_tmax(_constant_state(GRID_1D, 0.0, 1.0), cfg)
    profile = continuity_profile(trajectory, cfg.mu)
    count = len(trajectory.snapshots) - 1
    assert profile.jumps.shape == profile.steps.shape == (count,)
    assert np.all(profile.steps > 0.0)
    assert math.isfinite(profile.max_rate)
    # |d/dt (u, v)| in H^1 x L^2 is sqrt(2 pi) (v + v^2) <= 6 sqrt(2 pi)
    assert profile.max_rate <= 6.5 * math.sqrt(2 * math.pi)
    assert continuity_profile([], cfg.mu).max_rate == 0.0


@pytest.mark.parametrize("count", [2, 3, 5, 9])
def test_midpoint_stencils_interpolate_cubics(count):
    """Test that each midpoint stencil is exact on s^3 - 2 s."""
    kernel = _SlabKernel(Grid(1, 16, math.pi), 1.0, count)
    nodes = np.linspace(0.0, 1.0, count)
    values = nodes**3 - 2.0 * nodes
    degree = min(3, count - 1)
    for i, (start, weights) in enumerate(kernel.midpoint_stencils):
        mid = 0.5 * (nodes[i] + nodes[i + 1])
        assert weights.sum() == pytest.approx(1.0, rel=1e-13)
        if degree == 3:
            got = weights @ values[start : start + len(weights)]
            assert got == pytest.approx(mid**3 - 2.0 * mid, abs=1e-13)
