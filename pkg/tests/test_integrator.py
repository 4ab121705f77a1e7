import os

import numpy as np
import pytest
from pydantic import ValidationError

from field_ops import VectorField, make_initial_field, norm_values, random_dirichlet_field
from field_ops.operators import laplacian_values
from grid_cutoff import CutoffProfile, make_grid
from integrator import (
    ImplicitSolver,
    LLBIntegrator,
    SimConfig,
    resolve_threads,
    strong_convergence,
)
from noise_model import build_basis
from utils.errors import BlowUpError, GridMismatchError


# ----------------------------------------------------------------------
# SimConfig
# ----------------------------------------------------------------------

def test_defaults_are_valid():
    config = SimConfig()
    assert config.steps == 1000
    assert config.samples == 101
    assert not config.experimental


@pytest.mark.parametrize(
    "changes",
    [
        {"unknown": 1},
        {"intensity": 1.5},
        {"spacing": 0.3},
        {"dt": 0.003, "horizon": 0.02},
        {"sample_stride": 3, "horizon": 0.02},
        {"tail_ladder": (1.0, 0.5)},
        {"tail_ladder": (0.5, 4.0)},
        {"tail_ladder": ()},
    ],
)
def test_invalid_configs_rejected(changes):
    with pytest.raises(ValidationError):
        SimConfig(**changes)


def test_explicit_scheme_guard():
    with pytest.raises(ValidationError, match="stability guard"):
        SimConfig(scheme="explicit", spacing=0.25, radius=2.0, dt=0.05, horizon=1.0)
    SimConfig(scheme="explicit", spacing=0.25, radius=2.0, dt=0.025, horizon=1.0)


def test_linear_switches_off_nonlinear_terms(small_config):
    linear = small_config.linear()
    assert not (linear.include_precession or linear.include_cubic or linear.include_multiplicative)
    assert linear.dt == small_config.dt


# ----------------------------------------------------------------------
# Building blocks
# ----------------------------------------------------------------------

@pytest.mark.parametrize("grid", [make_grid(1, 2.0, 0.25), make_grid(2, 1.0, 0.25)])
def test_implicit_solver_residual(grid, rng):
    dt = 0.01
    rhs = rng.standard_normal((2,) + grid.shape + (3,))
    solved = ImplicitSolver(grid).solve(rhs, dt)
    applied = (1.0 + dt) * solved - dt * laplacian_values(solved, grid)
    interior = (slice(None),) + grid.interior_slices
    assert np.allclose(applied[interior], rhs[interior], atol=1e-12)
    assert np.all(solved[:, grid.boundary_mask] == 0.0)


def test_drift_of_zero_is_zero(small_integrator):
    drift = small_integrator.drift(VectorField.zeros(small_integrator.grid))
    assert np.all(drift.values == 0.0)


def test_required_halvings_bounds(small_integrator):
    dt = small_integrator.config.dt
    assert small_integrator.required_halvings(0.0, dt) == 1
    assert small_integrator.required_halvings(1e6, dt) == small_integrator.config.max_halvings


def test_initial_state_is_cut_off(small_integrator):
    grid = small_integrator.grid
    u0 = VectorField.constant(grid, (0.0, 0.0, 1.0))
    start = small_integrator.initial_state(u0)
    expected = CutoffProfile(grid.radius).on_grid(grid)
    assert np.allclose(start.values[..., 2], expected)
    assert np.all(start.boundary_values() == 0.0)


def test_integrator_rejects_foreign_grids(small_config):
    other = make_grid(1, 4.0, 0.25)
    with pytest.raises(GridMismatchError):
        LLBIntegrator(small_config, basis=build_basis(other, 2))
    with pytest.raises(GridMismatchError):
        LLBIntegrator(small_config).drift(VectorField.zeros(make_grid(1, 2.0, 0.5)))


# ----------------------------------------------------------------------
# Trajectories
# ----------------------------------------------------------------------

def test_noise_free_energy_decreases(small_config, bump):
    integrator = LLBIntegrator(small_config.updated(intensity=0.0))
    result = integrator.simulate(bump)
    l2 = result.observables["l2"][0]
    assert np.all(np.diff(l2) < 0.0)


def test_zero_stays_zero_without_noise(small_config):
    integrator = LLBIntegrator(small_config.updated(intensity=0.0))
    result = integrator.simulate(VectorField.zeros(integrator.grid), keep_final=True)
    assert np.all(result.final_values == 0.0)
    assert np.all(result.observables["h2"] == 0.0)


def test_results_do_not_depend_on_threads(small_config, bump):
    integrator = LLBIntegrator(small_config.updated(block_size=2))
    serial = integrator.simulate_ensemble(bump, 6, threads=1)
    parallel = integrator.simulate_ensemble(bump, 6, threads=4)
    for name in integrator.names:
        assert np.array_equal(serial.observables[name], parallel.observables[name])
    assert serial.trajectory_ids.tolist() == list(range(6))


def test_deterministic_switch_forces_one_thread(monkeypatch):
    monkeypatch.setenv("LLB_DETERMINISTIC", "1")
    assert resolve_threads(8) == 1
    monkeypatch.delenv("LLB_DETERMINISTIC")
    assert resolve_threads(3) == 3
    assert resolve_threads(0) == (os.cpu_count() or 1)


def test_blow_up_is_flagged(small_config):
    integrator = LLBIntegrator(small_config.updated(linf_ceiling=1e12, max_halvings=1))
    u0 = make_initial_field(integrator.grid, "bump", amplitude=1e3)
    result = integrator.simulate_ensemble(u0, 2, threads=1)
    assert result.failed.all()
    assert np.all(np.isnan(result.observables["l2"][:, -1]))
    assert np.all(result.last_finite_time < small_config.horizon)
    with pytest.raises(BlowUpError) as excinfo:
        result.raise_for_failures()
    assert excinfo.value.trajectory_ids == [0, 1]


def test_monitor_activates_above_ceiling(small_config):
    integrator = LLBIntegrator(small_config.updated(linf_ceiling=1.0))
    u0 = make_initial_field(integrator.grid, "bump", amplitude=2.0)
    result = integrator.simulate_ensemble(u0, 2, threads=1)
    assert not result.failed.any()
    assert np.all(result.monitor_activations > 0)


def test_step_api_matches_block_run(small_integrator, bump):
    state = small_integrator.start(bump, trajectory_id=0)
    while state.step_index < small_integrator.config.steps:
        state = small_integrator.step(state)
    assert state.t == pytest.approx(small_integrator.config.horizon)
    with pytest.raises(ValueError):
        small_integrator.step(state)

    result = small_integrator.simulate(bump)
    stepped = [record.norms.l2 for record in state.records]
    assert np.allclose(stepped, result.observables["l2"][0], rtol=1e-12, atol=0.0)


def test_records_and_frame(small_integrator, bump):
    result = small_integrator.simulate_ensemble(bump, 3, threads=1)
    records = result.records(1)
    assert len(records) == len(result.times)
    assert records[-1].norms.h1 == result.observables["h1"][1, -1]
    assert records[0].tail("L2", 0.5) == result.observables["tail_l2@0.5"][1, 0]

    frame = result.to_frame()
    assert len(frame) == len(result.names) * 3 * len(result.times)
    assert set(frame["statistic"]) == set(result.names)


def test_coupled_equal_intensities_coincide(small_integrator, bump):
    result = small_integrator.simulate_coupled(bump, [0.5, 0.5], trajectories=2, threads=1)
    assert result.pair_differences["l2"].shape == (2, 1, len(result.times))
    assert np.max(result.pair_differences["l2"]) <= 1e-20
    assert result.intensities.tolist() == [0.5, 0.5, 0.5, 0.5]


def test_coupled_distinct_intensities_separate(small_integrator, bump):
    result = small_integrator.simulate_coupled(bump, [0.2, 0.8], trajectories=2, threads=1)
    assert np.all(result.sup_pair_differences("h1") > 0.0)


@pytest.mark.slow
def test_intensity_continuity_is_linear_in_delta():
    deltas = np.array([0.1, 0.05, 0.025])
    integrator = LLBIntegrator(SimConfig(intensity=0.5))
    u0 = make_initial_field(integrator.grid, "bump")
    result = integrator.simulate_coupled(u0, [0.5, *(0.5 + deltas)], trajectories=32, threads=0)
    assert not result.failed.any()
    # pairs (0, 1), (0, 2), (0, 3) compare the base intensity with each shift
    medians = np.median(result.sup_pair_differences("h1")[:, : len(deltas)], axis=0)
    assert np.all(np.diff(medians) < 0.0)
    slope = np.polyfit(np.log(deltas), np.log(medians), 1)[0]
    assert slope == pytest.approx(1.0, abs=0.3)


def test_two_dimensional_runs_are_experimental():
    config = SimConfig(
        dimension=2, radius=1.0, spacing=0.25, horizon=0.01, sample_stride=5, modes=2, tail_ladder=(0.5,)
    )
    integrator = LLBIntegrator(config)
    u0 = random_dirichlet_field(integrator.grid, np.random.default_rng(0), amplitude=0.5)
    result = integrator.simulate(u0)
    assert config.experimental and result.experimental
    assert np.all(np.isfinite(result.observables["h1"]))


def test_strong_error_decreases_with_dt(small_config, bump):
    config = small_config.updated(horizon=0.1)
    study = strong_convergence(config, bump, dts=(0.01, 0.005), dt_reference=0.00125, trajectories=8, threads=1)
    assert study.errors[0] > study.errors[1] > 0.0
    assert study.slope > 0.0


def test_strong_convergence_requires_multiples(small_config, bump):
    with pytest.raises(ValueError):
        strong_convergence(small_config.updated(horizon=0.1), bump, dts=(0.003,), dt_reference=0.002, trajectories=1)


def test_observables_match_field_norms(small_integrator, bump):
    result = small_integrator.simulate(bump, keep_final=True)
    final = norm_values(result.final_values[0], small_integrator.grid)
    assert result.observables["l2"][0, -1] == pytest.approx(float(final["l2"]), rel=1e-12)
