"""
Numerical identities and inequalities the estimates rest on.

These helpers measure residuals and empirical constants; they never assert.
Callers (tests, the identity-suite experiment) decide on tolerances.
"""

from dataclasses import dataclass

import numpy as np

from grid_cutoff import make_grid
from utils.errors import GridError
from .norms import norm_values
from .operators import cross, gradient_values, laplacian_values
from .vector_field import VectorField


@dataclass(frozen=True)
class ConvergenceStudy:
    spacings: tuple
    errors: tuple
    slope: float


def dirichlet_sine(grid, index):
    """Unnormalised Dirichlet sine mode ``prod_i sin(j_i pi (x_i + n) / (2n))``.

    ``index`` is an int (applied along every axis) or a tuple with one entry
    per axis.
    """
    if np.isscalar(index):
        index = (int(index),) * grid.dimension
    n = grid.radius
    values = np.ones(grid.shape)
    for axis, j in enumerate(index):
        values = values * np.sin(j * np.pi * (grid.coords[..., axis] + n) / (2.0 * n))
    return values


def random_dirichlet_field(grid, rng, max_mode=3, amplitude=1.0):
    """Random smooth field vanishing on the cube boundary.

    Each component is a combination of the first ``max_mode`` sine modes per
    axis with standard normal coefficients, rescaled to ``amplitude`` in sup
    norm.
    """
    values = np.zeros(grid.shape + (3,))
    indices = np.ndindex(*((max_mode,) * grid.dimension))
    for index in indices:
        mode = dirichlet_sine(grid, tuple(i + 1 for i in index))
        values += mode[..., None] * rng.standard_normal(3)
    peak = np.max(np.sqrt(np.sum(values**2, axis=-1)))
    if peak > 0:
        values *= amplitude / peak
    return VectorField(grid, values)


# ----------------------------------------------------------------------
# Pointwise algebra
# ----------------------------------------------------------------------

def cross_orthogonality_residual(a, b):
    """Largest ``|<a x b, a>| / (|a|^2 |b|)`` over the sample axis."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    dot = np.abs(np.sum(cross(a, b) * a, axis=-1))
    scale = np.sum(a**2, axis=-1) * np.sqrt(np.sum(b**2, axis=-1))
    return float(np.max(dot / np.maximum(scale, np.finfo(float).tiny)))


def cross_orthogonality_campaign(samples, seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((samples, 3))
    b = rng.standard_normal((samples, 3))
    return cross_orthogonality_residual(a, b)


# ----------------------------------------------------------------------
# Discrete calculus
# ----------------------------------------------------------------------

def laplacian_convergence(radius=4.0, spacings=(0.2, 0.1, 0.05), mode=1):
    """Relative sup error of the discrete Laplacian on a Dirichlet eigenfunction.

    Returns a :class:`ConvergenceStudy` whose ``slope`` is the least-squares
    log-log slope of error against spacing.
    """
    errors = []
    for h in spacings:
        grid = make_grid(1, radius, h)
        shape = dirichlet_sine(grid, mode)
        eigenvalue = (mode * np.pi / (2.0 * radius)) ** 2
        values = np.zeros(grid.shape + (3,))
        values[..., 0] = shape
        discrete = laplacian_values(values, grid)[grid.interior_slices]
        exact = -eigenvalue * values[grid.interior_slices]
        errors.append(float(np.max(np.abs(discrete - exact)) / np.max(np.abs(exact))))
    slope = float(np.polyfit(np.log(spacings), np.log(errors), 1)[0])
    return ConvergenceStudy(tuple(spacings), tuple(errors), slope)


def integration_by_parts_residual(u, v):
    """``|<lap u, v> + <grad u, grad v>|`` with trapezoid quadrature."""
    u.check_same_grid(v)
    grid = u.grid
    weights = grid.quadrature_weights
    lap_term = np.sum(weights * np.sum(laplacian_values(u.values, grid) * v.values, axis=-1))
    grad_term = 0.0
    for gu, gv in zip(gradient_values(u.values, grid), gradient_values(v.values, grid)):
        grad_term += np.sum(weights * np.sum(gu * gv, axis=-1))
    return float(abs(lap_term + grad_term))


# ----------------------------------------------------------------------
# Embedding constants
# ----------------------------------------------------------------------

def gagliardo_nirenberg_ratio(u):
    """``||u||_inf / (||u|| ||grad u||)^(1/2)`` for a 1-D field."""
    if u.grid.dimension != 1:
        raise GridError("the L-infinity interpolation ratio is defined for d = 1")
    values = norm_values(u.values, u.grid)
    denominator = np.sqrt(np.sqrt(values["l2"] * values["grad"]))
    return float(values["linf"] / denominator) if denominator > 0 else 0.0


def l4_interpolation_ratio(u):
    """``||u||_4 / (||grad u||^(d/4) ||u||^((4-d)/4))``."""
    d = u.grid.dimension
    values = norm_values(u.values, u.grid)
    l2 = np.sqrt(values["l2"])
    grad = np.sqrt(values["grad"])
    denominator = grad ** (d / 4.0) * l2 ** ((4.0 - d) / 4.0)
    return float(values["l4"] ** 0.25 / denominator) if denominator > 0 else 0.0


def embedding_constants(grid, count, seed, max_mode=3):
    """Largest measured interpolation ratios over ``count`` random fields."""
    rng = np.random.default_rng(seed)
    gn = 0.0
    l4 = 0.0
    for _ in range(count):
        u = random_dirichlet_field(grid, rng, max_mode=max_mode)
        if grid.dimension == 1:
            gn = max(gn, gagliardo_nirenberg_ratio(u))
        l4 = max(l4, l4_interpolation_ratio(u))
    constants = {"l4_interpolation": l4}
    if grid.dimension == 1:
        constants["gagliardo_nirenberg"] = gn
    return constants
