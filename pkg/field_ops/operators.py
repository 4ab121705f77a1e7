"""
Cross-product algebra and discrete differential operators.

The ``*_values`` kernels accept arrays of shape ``(..., *grid.shape, 3)`` so
the integrator can apply them to whole trajectory blocks; the public
operators wrap them for single :class:`VectorField` objects.
"""

import numpy as np


def cross(a, b):
    """Cross product over the last axis.

    Examples
    --------
    >>> cross([1, 0, 0], [0, 1, 0]).tolist()
    [0.0, 0.0, 1.0]
    """
    return np.cross(np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def triple(u, f):
    """Return ``(u x f) x f``, the summand of the Ito correction."""
    f = np.asarray(f, dtype=float)
    return np.cross(np.cross(np.asarray(u, dtype=float), f), f)


def spatial_axes(values, grid):
    """Axes of ``values`` that index grid nodes."""
    last = values.ndim - 1
    return tuple(range(last - grid.dimension, last))


def laplacian_values(values, grid):
    """Five-point (three-point in 1-D) Laplacian at interior nodes.

    Output at the Dirichlet boundary nodes is zero; ghost values outside the
    cube are never read.
    """
    values = np.asarray(values, dtype=float)
    axes = spatial_axes(values, grid)
    core = [slice(None)] * values.ndim
    for ax in axes:
        core[ax] = slice(1, -1)
    centre = values[tuple(core)]
    acc = np.zeros_like(centre)
    for ax in axes:
        forward = list(core)
        backward = list(core)
        forward[ax] = slice(2, None)
        backward[ax] = slice(None, -2)
        acc += values[tuple(forward)] - 2.0 * centre + values[tuple(backward)]
    out = np.zeros_like(values)
    out[tuple(core)] = acc / grid.spacing**2
    return out


def gradient_values(values, grid):
    """Per-axis derivatives: central inside, one-sided first order on the boundary."""
    values = np.asarray(values, dtype=float)
    return tuple(
        np.gradient(values, grid.spacing, axis=ax, edge_order=1)
        for ax in spatial_axes(values, grid)
    )


def laplacian(u):
    return u.with_values(laplacian_values(u.values, u.grid))


def gradient(u):
    return tuple(u.with_values(g) for g in gradient_values(u.values, u.grid))
