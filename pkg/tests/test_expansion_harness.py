import numpy as np
import pytest

from expansion_harness import DomainExpansionHarness, tail_uniformity
from field_ops import make_initial_field
from grid_cutoff import make_grid
from integrator import SimConfig
from utils.errors import GridMismatchError


@pytest.fixture
def harness(small_config):
    return DomainExpansionHarness(small_config, threads=1)


@pytest.fixture
def u0_large(small_config):
    return make_initial_field(small_config.make_grid(), "bump", amplitude=0.5, width=0.5)


def test_expansion_report_shapes(harness, u0_large):
    report = harness.run_expansion((1.0, 2.0), u0_large, trajectories=3)
    assert report.differences.shape == (1, 3)
    assert np.all(np.isfinite(report.differences))
    assert np.all(report.differences >= 0.0)
    assert report.tail_profiles.shape == (2, 3)
    assert report.failed == 0
    assert len(report.median_differences) == 1
    assert report.embedding_defect <= 1e-14

    frame = report.to_frame()
    assert len(frame) == 1 + 2 * 3
    assert set(frame["statistic"]) == {"sup_l2_difference", "tail_l2"}
    assert report.to_dict()["radii"] == [1.0, 2.0]


def test_equal_radii_give_identical_paths(harness, u0_large):
    report = harness.run_expansion((2.0, 2.0), u0_large, trajectories=2)
    assert np.all(report.differences == 0.0)
    assert np.array_equal(report.tail_profiles[0], report.tail_profiles[1])


def test_tails_are_nested_per_radius(harness, u0_large):
    report = harness.run_expansion((1.0, 2.0), u0_large, trajectories=2)
    assert np.all(np.diff(report.tail_profiles, axis=1) <= 0.0)


def test_tail_uniformity_search(harness, u0_large):
    report = harness.run_expansion((1.0, 2.0), u0_large, trajectories=2)
    loose = tail_uniformity(report, eps_target=1e6)
    assert loose.m_star == 0.5
    assert not loose.exceeds_ladder
    assert loose.uniform

    strict = tail_uniformity(report, eps_target=0.0)
    assert strict.m_star is None
    assert strict.exceeds_ladder
    assert strict.per_radius == (None, None)


def test_tail_uniformity_needs_two_radii(harness, u0_large):
    report = harness.run_expansion((2.0,), u0_large, trajectories=1)
    with pytest.raises(ValueError):
        tail_uniformity(report, 1.0)


def test_invalid_ladders_rejected(harness, u0_large):
    with pytest.raises(ValueError):
        harness.run_expansion((), u0_large, trajectories=1)
    with pytest.raises(ValueError):
        harness.run_expansion((2.0, 1.0), u0_large, trajectories=1)
    with pytest.raises(GridMismatchError):
        harness.run_expansion((1.0, 2.0), make_initial_field(make_grid(1, 1.0, 0.25)), trajectories=1)


def test_chunked_runs_give_the_same_report(small_config, harness, u0_large):
    whole = harness.run_expansion((1.0, 2.0), u0_large, trajectories=3)
    chunked = DomainExpansionHarness(small_config, threads=1, chunk=1).run_expansion((1.0, 2.0), u0_large, 3)
    assert np.array_equal(whole.differences, chunked.differences)
    assert np.array_equal(whole.tail_profiles, chunked.tail_profiles)
    with pytest.raises(ValueError):
        DomainExpansionHarness(small_config, chunk=0)


def test_cut_off_paths_match_the_solution_on_the_inner_ball(harness, u0_large):
    radius = 1.0
    integrator = harness.integrator_for(radius)
    grid = integrator.grid
    result = integrator.simulate_ensemble(
        u0_large, 2, threads=1, probe=lambda values: values.reshape(len(values), -1)
    )
    u = result.probes["probe"].reshape((2, len(result.times)) + grid.shape + (3,))

    _, v, defect = harness.cut_off_paths(radius, u0_large, u0_large.grid, 2)
    v = v[(slice(None), slice(None)) + grid.nested_slices(u0_large.grid)]
    inner = grid.radius_map <= radius / 2
    assert np.array_equal(v[:, :, inner], u[:, :, inner])
    assert np.all(v[:, :, grid.radius_map >= 0.75 * radius] == 0.0)
    assert defect <= 1e-14


@pytest.mark.slow
def test_expansion_converges_with_uniform_tails():
    harness = DomainExpansionHarness(SimConfig(preset="bump"), threads=0)
    u0 = make_initial_field(make_grid(1, 16.0, 0.1), "bump")
    report = harness.run_expansion((4.0, 8.0, 16.0), u0, trajectories=16)
    assert report.failed == 0
    medians = report.median_differences
    assert medians[1] < medians[0]
    assert report.embedding_defect <= 1e-12

    uniformity = tail_uniformity(report, eps_target=1e-2)
    assert uniformity.m_star is not None
    assert uniformity.uniform
