"""
Finite truncations of the noise family ``{f_k}``.

A :class:`NoiseBasis` stores the unscaled modes ``f_1 .. f_K`` on one grid
together with their norm data; the intensity ``eps`` is applied by the
stochastic terms, so a basis can be re-used at every intensity.
"""

import logging
from functools import cached_property

import numpy as np

from grid_cutoff import CutoffProfile
from field_ops import norm_values
from field_ops.operators import gradient_values
from utils.errors import GridMismatchError, NoiseError

logger = logging.getLogger(__name__)

NOISE_PRESETS = ("bump", "fourier")
TRUNCATION_TAIL_MODES = 32


def _van_der_corput(k):
    """Base-2 radical inverse of ``k`` (0 -> 0, 1 -> 1/2, 2 -> 1/4, ...)."""
    value, denominator = 0.0, 1.0
    while k:
        denominator *= 2.0
        k, remainder = divmod(k, 2)
        value += remainder / denominator
    return value


def _preset_modes(grid, family, indices, bump_radius):
    modes = np.zeros((len(indices),) + grid.shape + (3,))
    n = grid.radius
    for row, k in enumerate(indices):
        if family == "bump":
            centre = np.zeros(grid.dimension)
            centre[0] = bump_radius * (_van_der_corput(k - 1) - 0.5) / 2.0
            shape = CutoffProfile(bump_radius).value(grid.coords - centre)
        else:
            shape = np.sin(k * np.pi * (grid.coords[..., 0] + n) / (2.0 * n))
            if grid.dimension == 2:
                shape = shape * np.sin(np.pi * (grid.coords[..., 1] + n) / (2.0 * n))
        modes[row, ..., k % 3] = 2.0 ** (-k) * shape
    return modes


def _mode_norms(modes, grid, gradients=None):
    """``(W^{1,inf}, H^1)`` norms and squared L^2 norms per mode."""
    if modes.shape[0] == 0:
        return np.zeros(0), np.zeros(0), np.zeros(0)
    sup = np.max(np.sqrt(np.sum(modes**2, axis=-1)), axis=tuple(range(1, grid.dimension + 1)))
    grad_density = sum(np.sum(g**2, axis=-1) for g in (gradients or gradient_values(modes, grid)))
    grad_sup = np.max(np.sqrt(grad_density), axis=tuple(range(1, grid.dimension + 1)))
    values = norm_values(modes, grid)
    return sup + grad_sup, np.sqrt(values["h1"]), values["l2"]


class NoiseBasis:
    """Modes ``f_k`` with norm bookkeeping and intensity ``eps``.

    Parameters
    ----------
    grid : Grid
        Grid every mode lives on.
    modes : array_like
        Array of shape ``(K, *grid.shape, 3)``.
    intensity : float
        Noise intensity ``eps`` in ``[0, 1]``.
    preset : str
        Name of the family the modes came from (``"custom"`` otherwise).
    truncation_tail : float
        Summability mass of the modes beyond ``K`` (0 for custom modes).

    Raises
    ------
    NoiseError
        If the modes are non-finite or the intensity is out of range.
    """

    def __init__(self, grid, modes, intensity=1.0, preset="custom", truncation_tail=0.0):
        modes = np.array(modes, dtype=float)
        if modes.ndim != grid.dimension + 2 or modes.shape[1:] != grid.shape + (3,):
            raise GridMismatchError(
                f"modes have shape {modes.shape}, expected (K, *{grid.shape}, 3)"
            )
        if not np.all(np.isfinite(modes)):
            raise NoiseError(f"{preset} noise modes contain non-finite values")
        if not 0.0 <= intensity <= 1.0:
            raise NoiseError(f"noise intensity must lie in [0, 1], got {intensity}")
        modes.setflags(write=False)

        self.grid = grid
        self.modes = modes
        self.intensity = float(intensity)
        self.preset = preset
        self.truncation_tail = float(truncation_tail)
        self.gradients = gradient_values(modes, grid)
        for g in self.gradients:
            g.setflags(write=False)
        self.w1inf_norms, self.h1_norms, self.l2_sq_norms = _mode_norms(modes, grid, self.gradients)
        if not (np.all(np.isfinite(self.w1inf_norms)) and np.all(np.isfinite(self.h1_norms))):
            raise NoiseError(f"{preset} noise modes have non-finite norms")

    def __repr__(self):
        return f"NoiseBasis(preset={self.preset!r}, K={self.count}, eps={self.intensity})"

    @classmethod
    def from_modes(cls, grid, modes, eps=1.0):
        """Wrap user-supplied modes."""
        return cls(grid, modes, intensity=eps)

    @property
    def count(self):
        return self.modes.shape[0]

    @property
    def summability(self):
        """``S = sum_k (||f_k||_{W^{1,inf}} + ||f_k||_{H^1})``."""
        return float(np.sum(self.w1inf_norms) + np.sum(self.h1_norms))

    @property
    def forcing_energy(self):
        """``eps^2 sum_k ||f_k||^2``, the noise input of the L^2 balance."""
        return self.intensity**2 * float(np.sum(self.l2_sq_norms))

    @cached_property
    def outer_product_field(self):
        """``P(x) = sum_k f_k(x) f_k(x)^T``, shape ``(*grid.shape, 3, 3)``."""
        outer = np.einsum("k...i,k...j->...ij", self.modes, self.modes)
        outer.setflags(write=False)
        return outer

    # ------------------------------------------------------------------
    # Derived bases
    # ------------------------------------------------------------------

    def with_intensity(self, eps):
        basis = NoiseBasis.__new__(NoiseBasis)
        basis.__dict__.update(self.__dict__)
        if not 0.0 <= eps <= 1.0:
            raise NoiseError(f"noise intensity must lie in [0, 1], got {eps}")
        basis.intensity = float(eps)
        return basis

    def localized(self, profile):
        """Modes multiplied by a cut-off profile (``theta_n f_k``)."""
        weights = profile.on_grid(self.grid)
        return NoiseBasis(
            self.grid,
            self.modes * weights[..., None],
            self.intensity,
            self.preset,
            self.truncation_tail,
        )

    # ------------------------------------------------------------------
    # Combination with Wiener increments
    # ------------------------------------------------------------------

    def combine(self, increments):
        """``sum_k f_k dW_k``; increments of shape ``(K,)`` or ``(B, K)``."""
        increments = np.asarray(increments, dtype=float)
        if increments.shape[-1] != self.count:
            raise NoiseError(f"{increments.shape[-1]} increments for {self.count} modes")
        if self.count == 0:
            return np.zeros(increments.shape[:-1] + self.grid.shape + (3,))
        return np.tensordot(increments, self.modes, axes=([-1], [0]))


def build_basis(grid, K, family="bump", eps=1.0, bump_radius=1.0):
    """Build a preset noise basis.

    Parameters
    ----------
    grid : Grid
        Target grid.
    K : int
        Number of modes, ``K >= 0``.
    family : str
        ``"bump"``: ``2^-k theta((x - c_k) / R) e_{(k mod 3)+1}`` with centres
        ``c_k`` on a dyadic lattice of ``|x| <= R/4`` and support in
        ``|x| <= R``; ``"fourier"``: ``2^-k`` times the k-th Dirichlet sine
        along the first axis (and the first sine along the second in 2-D).
    eps : float
        Intensity in ``[0, 1]``.
    bump_radius : float
        ``R`` of the bump family.

    Examples
    --------
    >>> build_basis(make_grid(1, 4, 0.5), 0, "bump").summability
    0.0
    """
    if K < 0:
        raise NoiseError(f"mode count must be non-negative, got {K}")
    if family not in NOISE_PRESETS:
        raise NoiseError(f"unknown noise preset {family!r}, expected one of {NOISE_PRESETS}")
    if not bump_radius > 0:
        raise NoiseError(f"bump radius must be positive, got {bump_radius}")

    modes = _preset_modes(grid, family, range(1, K + 1), bump_radius)
    tail_modes = _preset_modes(grid, family, range(K + 1, K + 1 + TRUNCATION_TAIL_MODES), bump_radius)
    tail_w1inf, tail_h1, _ = _mode_norms(tail_modes, grid)
    basis = NoiseBasis(
        grid,
        modes,
        intensity=eps,
        preset=family,
        truncation_tail=float(np.sum(tail_w1inf) + np.sum(tail_h1)),
    )
    logger.debug("built %r, S=%.6g, tail=%.3g", basis, basis.summability, basis.truncation_tail)
    return basis
