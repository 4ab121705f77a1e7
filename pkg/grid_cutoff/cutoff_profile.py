"""
Smooth cut-off profiles used by the domain-expansion construction.

``theta`` equals 1 on ``|x| <= 1/2``, 0 on ``|x| >= 3/4`` and bridges the two
with the smoothstep ``s(t) = t^2 (3 - 2t)`` on the normalised annulus, which
makes it C^1 with ``max |grad theta| = 6`` (so ``|grad theta_n| <= 6/n``).
``phi = 1 - theta`` is the complementary profile localising tails.
"""

import numpy as np

from utils.errors import GridMismatchError

INNER_RADIUS = 0.5
OUTER_RADIUS = 0.75


def _point_norm(x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        return np.abs(x)
    return np.sqrt(np.sum(x**2, axis=-1))


def _bridge(t):
    return t * t * (3.0 - 2.0 * t)


def _bridge_derivative(t):
    return 6.0 * t * (1.0 - t)


class CutoffProfile:
    """The rescaled profile ``theta(x / scale)`` or its complement.

    Parameters
    ----------
    scale : float
        Rescaling radius (``n`` for ``theta_n``, ``m`` for ``phi_m``).
    complement : bool
        If ``True`` the profile is ``phi = 1 - theta``.
    dimension : int | None
        Dimension of the coordinate frame; ``None`` accepts any frame.
    inner, outer : float
        Normalised radii where the bridge starts and ends.
    """

    def __init__(self, scale, complement=False, dimension=None, inner=INNER_RADIUS, outer=OUTER_RADIUS):
        if not scale > 0:
            raise ValueError(f"cut-off scale must be positive, got {scale}")
        if not 0 <= inner < outer:
            raise ValueError("cut-off radii must satisfy 0 <= inner < outer")
        self.scale = float(scale)
        self.complement = bool(complement)
        self.dimension = dimension
        self.inner = float(inner)
        self.outer = float(outer)

    def __repr__(self):
        name = "phi" if self.complement else "theta"
        return f"CutoffProfile({name}, scale={self.scale})"

    def complement_profile(self):
        return CutoffProfile(
            self.scale, not self.complement, self.dimension, self.inner, self.outer
        )

    # ------------------------------------------------------------------
    # Evaluation
    # ------------------------------------------------------------------

    def _normalised(self, points):
        r = _point_norm(points) / self.scale
        return np.clip((r - self.inner) / (self.outer - self.inner), 0.0, 1.0)

    def value(self, points):
        """Profile value at ``points`` (scalar, or array with the point axis last)."""
        theta = 1.0 - _bridge(self._normalised(points))
        return 1.0 - theta if self.complement else theta

    def gradient(self, points):
        """Analytic gradient, shape ``points.shape``."""
        points = np.asarray(points, dtype=float)
        t = self._normalised(points)
        r = _point_norm(points)
        slope = -_bridge_derivative(t) / ((self.outer - self.inner) * self.scale)
        if self.complement:
            slope = -slope
        with np.errstate(invalid="ignore", divide="ignore"):
            direction = np.where(r > 0, 1.0 / np.where(r > 0, r, 1.0), 0.0)
        if points.ndim == 0:
            return slope * np.sign(points)
        return (slope * direction)[..., None] * points

    def on_grid(self, grid):
        """Profile values at every node of ``grid``."""
        if self.dimension is not None and self.dimension != grid.dimension:
            raise GridMismatchError(
                f"profile is defined on R^{self.dimension}, grid on R^{grid.dimension}"
            )
        return self.value(grid.coords)


def theta(x, scale):
    """Evaluate ``theta(x / scale)``.

    A scalar or a flat array holds points on the line; points in the plane
    need a trailing coordinate axis, shape ``(..., d)`` with ``d >= 1``.

    Examples
    --------
    >>> theta(0.4 * 4, 4)
    1.0
    >>> theta(0.9 * 4, 4)
    0.0
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    value = CutoffProfile(scale).value(x)
    return float(value) if np.ndim(value) == 0 else value


def apply_cutoff(field, profile):
    """Pointwise product of a vector field with a cut-off profile.

    The result vanishes wherever the profile does, so it can be
    zero-extended to any larger nested grid.
    """
    weights = profile.on_grid(field.grid)
    return field.with_values(field.values * weights[..., None])
