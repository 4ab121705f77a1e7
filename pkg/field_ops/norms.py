"""
Norms and functionals monitored by the energy and tail estimates.

All integrals use the tensor trapezoid rule of the grid. Squared norms are
reported (``l2 = ||u||^2``, ``h1 = ||u||^2 + ||grad u||^2``,
``h2 = h1 + ||lap u||^2``, ``l4 = ||u||_4^4``); ``linf`` is the plain sup norm.
"""

from dataclasses import dataclass, asdict

import numpy as np

from utils.errors import GridError
from .operators import gradient_values, laplacian_values, spatial_axes

TAIL_ORDERS = ("L2", "H1")


@dataclass(frozen=True)
class NormReport:
    """Norms of one field; every entry is non-negative and ``h2 >= h1 >= l2``."""

    l2: float
    h1: float
    h2: float
    l4: float
    linf: float
    cross_energy: float

    def to_dict(self):
        return asdict(self)


def _densities(values, grid):
    squared = np.sum(values**2, axis=-1)
    grad_squared = sum(np.sum(g**2, axis=-1) for g in gradient_values(values, grid))
    return squared, grad_squared


def norm_values(values, grid):
    """Batched norms; returns a dict of arrays over the leading batch axes.

    Keys: ``l2``, ``grad``, ``h1``, ``h2``, ``l4``, ``linf``, ``cross_energy``.
    """
    values = np.asarray(values, dtype=float)
    axes = spatial_axes(values, grid)
    weights = grid.quadrature_weights
    squared, grad_squared = _densities(values, grid)
    laplacian_squared = np.sum(laplacian_values(values, grid) ** 2, axis=-1)

    l2 = np.sum(weights * squared, axis=axes)
    grad = np.sum(weights * grad_squared, axis=axes)
    lap = np.sum(weights * laplacian_squared, axis=axes)
    h1 = l2 + grad
    return {
        "l2": l2,
        "grad": grad,
        "h1": h1,
        "h2": h1 + lap,
        "l4": np.sum(weights * squared**2, axis=axes),
        "linf": np.sqrt(np.max(squared, axis=axes)),
        "cross_energy": np.sum(weights * squared * grad_squared, axis=axes),
    }


def norms(u):
    """Full :class:`NormReport` of a single field."""
    values = norm_values(u.values, u.grid)
    return NormReport(**{name: float(values[name]) for name in NormReport.__dataclass_fields__})


def tail_values(values, grid, ladder, order="L2"):
    """Tail masses ``int_{|x| > m}`` for every ``m`` of ``ladder``.

    The integrand is accumulated over nodes sorted by decreasing ``|x|``, so
    the masses of a ladder are exactly nested (non-increasing in ``m``).

    Returns
    -------
    numpy.ndarray
        Shape ``(*batch, len(ladder))``.
    """
    if order not in TAIL_ORDERS:
        raise ValueError(f"tail order must be one of {TAIL_ORDERS}, got {order!r}")
    values = np.asarray(values, dtype=float)
    squared, grad_squared = _densities(values, grid)
    density = squared + grad_squared if order == "H1" else squared
    contribution = grid.quadrature_weights * density

    batch_shape = contribution.shape[: contribution.ndim - grid.dimension]
    flat = contribution.reshape(batch_shape + (-1,))[..., grid.descending_radius_order]
    cumulative = np.cumsum(flat, axis=-1)

    negated_radii = -grid.radius_map.ravel()[grid.descending_radius_order]
    out = np.zeros(batch_shape + (len(ladder),))
    for i, m in enumerate(ladder):
        count = int(np.searchsorted(negated_radii, -float(m), side="left"))
        if count:
            out[..., i] = cumulative[..., count - 1]
    return out


def tail_ladder(u, ladder, order="L2"):
    """Nested tail masses of one field over a ladder of radii."""
    for m in ladder:
        _check_tail_radius(m, u.grid)
    return tail_values(u.values, u.grid, ladder, order)


def tail_mass(u, m, order="L2"):
    """``int_{|x| > m} |u|^2 (+ |grad u|^2 for H1) dx``.

    Raises
    ------
    GridError
        If ``m`` is negative or not inside the grid radius.
    """
    _check_tail_radius(m, u.grid)
    return float(tail_values(u.values, u.grid, [m], order)[0])


def _check_tail_radius(m, grid):
    if m < 0 or m >= grid.radius:
        raise GridError(f"tail radius must lie in [0, {grid.radius}), got {m}")
