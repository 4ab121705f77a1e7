"""
Ito-form noise terms.

With ``P(x) = sum_k f_k f_k^T`` the correction ``1/2 sum_k (u x f_k) x f_k``
equals ``1/2 (P u - tr(P) u)`` and the diffusion ``sum_k (u x f_k + f_k) dW_k``
equals ``u x g + g`` with ``g = sum_k f_k dW_k``; both forms avoid a loop over
modes inside the time step.
"""

import numpy as np

from field_ops import norms, random_dirichlet_field
from field_ops.operators import cross
from grid_cutoff import make_grid
from utils.errors import GridMismatchError, NoiseError
from .noise_basis import NoiseBasis


def _check_grid(u, basis):
    if not u.grid.same_frame(basis.grid):
        raise GridMismatchError(f"field on {u.grid!r}, noise basis on {basis.grid!r}")


def ito_correction_values(values, basis):
    outer = basis.outer_product_field
    trace = np.trace(outer, axis1=-2, axis2=-1)
    projected = np.matmul(outer, values[..., None])[..., 0]
    return 0.5 * basis.intensity**2 * (projected - trace[..., None] * values)


def diffusion_values(values, basis, increments):
    """``eps (u x g + g)`` for increments of shape ``(B, K)`` and values ``(B, ...)``."""
    forcing = basis.intensity * basis.combine(increments)
    return cross(values, forcing) + forcing


def ito_correction(u, basis):
    """``1/2 eps^2 sum_k (u x f_k) x f_k``."""
    _check_grid(u, basis)
    return u.with_values(ito_correction_values(u.values, basis))


def diffusion(u, basis, dW):
    """``eps sum_k (u x f_k + f_k) dW_k`` for one :class:`WienerIncrement`."""
    _check_grid(u, basis)
    if dW.count != basis.count:
        raise NoiseError(f"increment has {dW.count} modes, basis has {basis.count}")
    return u.with_values(diffusion_values(u.values, basis, dW.values))


def _integrate(grid, density):
    return float(np.sum(grid.quadrature_weights * density))


def quadratic_variation_check(u, basis):
    """Residual of the Ito cancellation behind the L^2 energy balance.

    Returns ``|sum||u x f_k + f_k||^2 - sum||u x f_k||^2 - sum||f_k||^2|
    + |2 <C(u), u> + sum||u x f_k||^2|`` where ``C`` is the unit-intensity
    correction. Both terms vanish identically in exact arithmetic.
    """
    _check_grid(u, basis)
    grid = u.grid
    noise_sq = 0.0
    cross_sq = 0.0
    forcing_sq = 0.0
    for mode in basis.modes:
        rotated = cross(u.values, mode)
        noise_sq += _integrate(grid, np.sum((rotated + mode) ** 2, axis=-1))
        cross_sq += _integrate(grid, np.sum(rotated**2, axis=-1))
        forcing_sq += _integrate(grid, np.sum(mode**2, axis=-1))

    unit = basis.with_intensity(1.0)
    correction = ito_correction_values(u.values, unit)
    pairing = _integrate(grid, np.sum(correction * u.values, axis=-1))
    return abs(noise_sq - cross_sq - forcing_sq) + abs(2.0 * pairing + cross_sq)


def quadratic_variation_scale(u, basis):
    """Scale ``1 + ||u||_{H^1}^2 S^2`` the residual is measured against."""
    return 1.0 + norms(u).h1 * basis.summability**2


def quadratic_variation_campaign(pairs, seed, grid=None):
    """Largest relative residual over ``pairs`` random ``(u, basis)`` pairs."""
    grid = grid if grid is not None else make_grid(1, 2.0, 0.25)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(pairs):
        u = random_dirichlet_field(grid, rng, amplitude=rng.uniform(0.1, 2.0))
        K = int(rng.integers(1, 5))
        modes = np.stack(
            [random_dirichlet_field(grid, rng, amplitude=2.0 ** (-k)).values for k in range(1, K + 1)]
        )
        basis = NoiseBasis.from_modes(grid, modes, eps=rng.uniform(0.0, 1.0))
        residual = quadratic_variation_check(u, basis)
        worst = max(worst, residual / quadratic_variation_scale(u, basis))
    return worst
