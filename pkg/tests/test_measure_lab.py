import numpy as np
import pytest

from field_ops import VectorField, make_initial_field
from integrator import EnsembleResult, LLBIntegrator, SimConfig
from measure_lab import (
    EmpiricalMeasure,
    TightnessProfile,
    absorbing_time,
    bl_distance,
    common_tight_radius,
    dissipation_bound_check,
    energy_balance_residual,
    initial_data_continuity,
    integrated_dissipation_check,
    kb_measure,
    l2_gronwall_check,
    occupation_frequency,
    tightness_profile,
    weighted_quantile,
)
from utils.errors import InsufficientEnsembleError, ObservableError


def _synthetic_ensemble(times, **observables):
    size = len(next(iter(observables.values())))
    return EnsembleResult(
        times=np.asarray(times, dtype=float),
        observables={name: np.asarray(v, dtype=float) for name, v in observables.items()},
        failed=np.zeros(size, dtype=bool),
        last_finite_time=np.full(size, times[-1]),
        trajectory_ids=np.arange(size),
        intensities=np.ones(size),
    )


# ----------------------------------------------------------------------
# Energy balance and dissipation
# ----------------------------------------------------------------------

def test_energy_balance_needs_a_large_ensemble(small_integrator, bump):
    result = small_integrator.simulate_ensemble(bump, 4, threads=1)
    with pytest.raises(InsufficientEnsembleError):
        energy_balance_residual(result)


def test_energy_balance_needs_its_observables():
    ensemble = _synthetic_ensemble([0.0, 0.1, 0.2], l2=np.ones((40, 3)))
    with pytest.raises(ObservableError):
        energy_balance_residual(ensemble)


def test_energy_balance_closes(small_config):
    integrator = LLBIntegrator(small_config.updated(horizon=0.2, sample_stride=10))
    u0 = make_initial_field(integrator.grid, "bump", amplitude=0.8)
    result = integrator.simulate_ensemble(u0, 32, threads=1)
    balance = energy_balance_residual(result)
    assert len(balance.times) == len(result.times) - 2
    assert np.all(balance.error_bar > 0.0)
    assert balance.fraction_within >= 0.9
    assert set(balance.to_frame().columns) == {"time", "residual", "error_bar", "budget", "within"}


@pytest.mark.slow
def test_energy_balance_acceptance():
    integrator = LLBIntegrator(SimConfig(spacing=0.05, dt=1e-3, horizon=5.0, sample_stride=50))
    u0 = make_initial_field(integrator.grid, "bump", amplitude=0.8)
    result = integrator.simulate_ensemble(u0, 256, threads=0)
    assert not result.failed.any()
    balance = energy_balance_residual(result)
    assert balance.fraction_within >= 0.95
    assert balance.passed


def test_dissipation_fit(small_config):
    integrator = LLBIntegrator(small_config.updated(intensity=0.5, horizon=0.1))
    ensembles = [
        integrator.simulate_ensemble(make_initial_field(integrator.grid, "bump", amplitude=a), 4, threads=1)
        for a in (0.2, 0.8)
    ]
    fit = dissipation_bound_check(ensembles, ceiling=100.0)
    assert fit.passed
    assert len(fit.per_amplitude) == 2
    assert fit.initial_norms[0] < fit.initial_norms[1]
    assert fit.spread >= 1.0

    integrated = integrated_dissipation_check(ensembles, ceiling=100.0)
    assert np.isfinite(integrated.constant) and integrated.constant > 0.0

    with pytest.raises(ValueError, match="two amplitudes"):
        dissipation_bound_check(ensembles[:1])


@pytest.mark.parametrize("eps", [0.0, 0.5])
def test_l2_gronwall_bound(small_config, bump, eps):
    integrator = LLBIntegrator(small_config.updated(intensity=eps, horizon=0.1))
    check = l2_gronwall_check(integrator.simulate_ensemble(bump, 8, threads=1))
    assert check.passed


def test_absorbing_time():
    times = [0.0, 1.0, 2.0, 3.0]
    ensemble = _synthetic_ensemble(times, h1=[[3.0, 2.0, 1.0, 0.5], [3.0, 2.0, 1.0, 0.5]])
    assert absorbing_time(ensemble, 1.5) == 2.0
    assert absorbing_time(ensemble, 10.0) == 0.0
    assert absorbing_time(ensemble, 0.1) is None


# ----------------------------------------------------------------------
# Empirical measures
# ----------------------------------------------------------------------

def test_measure_validation():
    with pytest.raises(ObservableError):
        EmpiricalMeasure(("a",), np.zeros((2, 2)), np.full(2, 0.5))
    with pytest.raises(ValueError):
        EmpiricalMeasure(("a",), np.zeros((2, 1)), np.array([1.5, -0.5]))
    with pytest.raises(ValueError):
        EmpiricalMeasure(("a",), np.zeros((2, 1)), np.array([0.5, 0.6]))


def test_measure_accessors():
    measure = EmpiricalMeasure.uniform(("a", "b"), [[1.0, 2.0], [3.0, 4.0]])
    assert measure.size == 2
    assert measure.expectation("b") == pytest.approx(3.0)
    assert measure.select(("b",)).samples.tolist() == [[2.0], [4.0]]
    with pytest.raises(ObservableError):
        measure.column("c")
    with pytest.raises(ObservableError):
        measure.select(("c",))


def test_bl_distance_is_a_pseudometric(rng):
    names = ("x", "y", "z")
    mu = EmpiricalMeasure.uniform(names, rng.standard_normal((40, 3)))
    nu = EmpiricalMeasure.uniform(names, rng.standard_normal((30, 3)) + 0.5)
    rho = EmpiricalMeasure.uniform(names, rng.standard_normal((20, 3)) * 2.0)
    assert bl_distance(mu, mu) == 0.0
    assert bl_distance(mu, nu) == pytest.approx(bl_distance(nu, mu), abs=1e-14)
    assert bl_distance(mu, rho) <= bl_distance(mu, nu) + bl_distance(nu, rho) + 1e-14
    assert 0.0 < bl_distance(mu, nu) <= 1.0


def test_bl_distance_of_point_masses():
    names = ("a", "b")
    origin = EmpiricalMeasure.point_mass(names, [0.0, 0.0])
    near = EmpiricalMeasure.point_mass(names, [0.3, 0.0])
    far = EmpiricalMeasure.point_mass(names, [5.0, 0.0])
    assert bl_distance(origin, near) == pytest.approx(0.3, abs=1e-12)
    assert bl_distance(origin, far) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ObservableError):
        bl_distance(origin, EmpiricalMeasure.point_mass(("a", "c"), [0.0, 0.0]))


def test_kb_measure_sampling(small_integrator, bump):
    measure = kb_measure(small_integrator, bump, t_burn=0.01, t_avg=0.01, trajectories=3, threads=1)
    assert measure.size == 3 * 3
    assert np.allclose(measure.weights, 1.0 / 9.0)
    assert measure.metadata["seeds"] == 3
    assert measure.metadata["radius"] == 2.0
    assert measure.names == small_integrator.names

    snapshot = kb_measure(small_integrator, bump, t_burn=0.02, t_avg=0.0, trajectories=3, threads=1)
    assert snapshot.size == 3


def test_kb_measure_without_noise_stays_at_zero(small_config):
    integrator = LLBIntegrator(small_config.updated(intensity=0.0))
    measure = kb_measure(integrator, VectorField.zeros(integrator.grid), 0.01, 0.01, 2, threads=1)
    assert np.all(measure.samples == 0.0)
    assert occupation_frequency(measure, "h1", 0.0) == 1.0


def test_occupation_frequency_extremes(small_integrator, bump):
    measure = kb_measure(small_integrator, bump, 0.0, 0.02, 2, threads=1)
    assert occupation_frequency(measure, "h1", 1e9) == pytest.approx(1.0)
    assert occupation_frequency(measure, "h1", -1.0) == 0.0


# ----------------------------------------------------------------------
# Tightness
# ----------------------------------------------------------------------

def test_weighted_quantile():
    values = np.array([4.0, 1.0, 3.0, 2.0])
    weights = np.full(4, 0.25)
    assert weighted_quantile(values, weights, 0.5) == 2.0
    assert weighted_quantile(values, weights, 0.95) == 4.0


def test_tightness_profile(small_integrator, bump):
    measure = kb_measure(small_integrator, bump, 0.0, 0.02, 4, threads=1)
    profile = tightness_profile(measure, (0.5, 1.0, 1.5, 2.0))
    assert np.all(np.diff(profile.quantiles) <= 0.0)
    assert profile.quantiles[-1] == 0.0
    assert profile.level == 0.95
    with pytest.raises(ObservableError):
        tightness_profile(measure, (0.75,))


def test_common_tight_radius():
    ladder = (0.5, 1.0, 1.5)
    profiles = [
        TightnessProfile(ladder, (0.3, 0.05, 0.0), 0.95),
        TightnessProfile(ladder, (0.2, 0.2, 0.01), 0.95),
    ]
    assert common_tight_radius(profiles, 0.1) == 1.5
    assert common_tight_radius(profiles, 1.0) == 0.5
    assert common_tight_radius(profiles, 0.0) is None


@pytest.mark.slow
def test_h1_tails_are_uniform_in_intensity():
    ladder = (1.0, 2.0, 3.0, 4.0, 5.0, 6.0)
    base = SimConfig(radius=8.0, tail_ladder=ladder)
    profiles = []
    for eps in (0.0, 0.5, 1.0):
        integrator = LLBIntegrator(base.updated(intensity=eps))
        u0 = make_initial_field(integrator.grid, "bump")
        measure = kb_measure(integrator, u0, t_burn=2.0, t_avg=5.0, trajectories=16, threads=0)
        profiles.append(tightness_profile(measure, ladder))
    m_star = common_tight_radius(profiles, 1e-2)
    assert m_star is not None


# ----------------------------------------------------------------------
# Continuity in the initial data
# ----------------------------------------------------------------------

def test_identical_initial_data(small_integrator, bump):
    report = initial_data_continuity(small_integrator, bump, bump, 2, threads=1)
    assert report.identical
    assert np.all(report.ratios == 0.0)
    assert np.all(report.sup_differences == 0.0)


def test_continuity_ratio_is_stable_under_refinement(small_integrator, bump):
    grid = small_integrator.grid
    medians = []
    for delta in (1e-2, 1e-3):
        kick = make_initial_field(grid, "bump", amplitude=delta, direction=(0.0, 1.0, 0.0))
        report = initial_data_continuity(small_integrator, bump, bump + kick, 3, threads=1)
        assert not report.identical
        assert np.all(report.ratios >= 1.0)
        medians.append(report.median)
    assert medians[0] / medians[1] < 3.0
    assert medians[1] / medians[0] < 3.0


@pytest.mark.slow
def test_continuity_ratio_at_scale():
    integrator = LLBIntegrator(SimConfig())
    grid = integrator.grid
    u0 = make_initial_field(grid, "bump")
    medians = []
    for delta in (1e-2, 1e-3):
        kick = make_initial_field(grid, "bump", amplitude=delta, direction=(0.0, 1.0, 0.0))
        report = initial_data_continuity(integrator, u0, u0 + kick, 32, threads=0)
        assert np.all(np.isfinite(report.ratios))
        medians.append(report.median)
    assert max(medians) / min(medians) < 3.0
