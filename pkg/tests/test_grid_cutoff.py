import numpy as np
import pytest

from field_ops import VectorField, make_initial_field
from grid_cutoff import CutoffProfile, apply_cutoff, make_grid, theta
from utils.errors import GridError, GridMismatchError


def test_grid_shapes():
    assert make_grid(1, 4, 0.5).shape == (17,)
    assert make_grid(2, 2, 1.0).shape == (5, 5)


@pytest.mark.parametrize(
    "d, n, h",
    [(3, 1.0, 0.5), (1, 0.0, 0.5), (1, 1.0, -0.1), (1, 1.0, 0.3), (2, 1.0, 0.0)],
)
def test_invalid_grids_rejected(d, n, h):
    with pytest.raises(GridError):
        make_grid(d, n, h)


def test_quadrature_weights_integrate_volume():
    assert abs(make_grid(1, 4.0, 0.1).quadrature_weights.sum() - 8.0) < 1e-12
    assert abs(make_grid(2, 1.0, 0.25).quadrature_weights.sum() - 4.0) < 1e-12


def test_boundary_mask_counts(grid_1d, grid_2d):
    assert grid_1d.boundary_mask.sum() == 2
    assert grid_2d.boundary_mask.sum() == 4 * (grid_2d.points_per_axis - 1)


def test_nested_grids_share_coordinates():
    small = make_grid(1, 2.0, 0.25)
    large = make_grid(1, 4.0, 0.25)
    offset = small.offset_in(large)
    assert offset == 8
    assert np.array_equal(large.axis[offset : offset + small.points_per_axis], small.axis)
    assert small.is_nested_in(large)
    assert not large.is_nested_in(small)


def test_nesting_requires_same_spacing():
    with pytest.raises(GridMismatchError):
        make_grid(1, 2.0, 0.25).offset_in(make_grid(1, 4.0, 0.5))


def test_theta_plateau_and_support():
    assert theta(0.4 * 4, 4) == 1.0
    assert theta(0.9 * 4, 4) == 0.0
    middle = theta(0.625 * 4, 4)
    assert 0.0 < middle < 1.0


def test_complement_profile_sums_to_one(grid_2d):
    profile = CutoffProfile(1.0, dimension=2)
    total = profile.on_grid(grid_2d) + profile.complement_profile().on_grid(grid_2d)
    assert np.allclose(total, 1.0, atol=1e-15)


def test_gradient_matches_finite_differences():
    profile = CutoffProfile(4.0)
    points = np.linspace(2.05, 2.95, 19)[:, None]
    step = 1e-6
    numeric = (profile.value(points + step) - profile.value(points - step)) / (2 * step)
    assert np.allclose(profile.gradient(points)[:, 0], numeric, atol=1e-6)


def test_gradient_bound_scales_with_radius():
    scaled = []
    for n in (1.0, 4.0, 16.0, 64.0):
        points = np.linspace(-n, n, 2001)[:, None]
        slope = np.abs(CutoffProfile(n).gradient(points))
        assert slope.max() <= 6.0 / n + 1e-12
        scaled.append(n * slope.max())
    # n |grad theta_n| does not depend on n
    assert np.allclose(scaled, 6.0, rtol=1e-9)


def test_theta_reads_flat_arrays_as_points_on_the_line():
    line = theta(np.array([1.6, 3.6, -3.6, -1.0]), 4)
    assert line.tolist() == [1.0, 0.0, 0.0, 1.0]
    plane = theta(np.array([[1.6, 0.0], [2.4, 2.4]]), 4)
    assert plane.tolist() == [1.0, 0.0]


def test_apply_cutoff_localises(grid_1d):
    u = VectorField.constant(grid_1d, (0.0, 1.0, 0.0))
    cut = apply_cutoff(u, CutoffProfile(grid_1d.radius))
    r = grid_1d.radius_map
    assert np.all(cut.values[r >= 0.75 * grid_1d.radius] == 0.0)
    assert np.array_equal(cut.values[r <= 0.5 * grid_1d.radius], u.values[r <= 0.5 * grid_1d.radius])


def test_apply_cutoff_rejects_other_dimension(grid_1d):
    u = make_initial_field(grid_1d, "gaussian")
    with pytest.raises(GridMismatchError):
        apply_cutoff(u, CutoffProfile(2.0, dimension=2))
