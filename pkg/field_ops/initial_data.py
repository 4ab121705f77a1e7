"""
Initial-data presets.
"""

import numpy as np

from grid_cutoff.cutoff_profile import OUTER_RADIUS, CutoffProfile
from .vector_field import VectorField

INITIAL_PROFILES = ("bump", "gaussian", "sine", "zero")


def make_initial_field(grid, profile="bump", amplitude=1.0, width=1.0, direction=(1.0, 0.0, 0.0)):
    """Build ``amplitude * shape(x) * direction`` on ``grid``.

    Parameters
    ----------
    profile : str
        ``bump``: smooth compact bump supported in ``|x| <= width``;
        ``gaussian``: ``exp(-|x|^2 / width^2)``;
        ``sine``: first Dirichlet sine mode of the cube;
        ``zero``: the zero field.
    direction : sequence of float
        Spin direction, normalised to unit length.
    """
    if profile not in INITIAL_PROFILES:
        raise ValueError(f"unknown initial profile {profile!r}, expected one of {INITIAL_PROFILES}")
    if not width > 0:
        raise ValueError(f"initial-data width must be positive, got {width}")
    direction = np.asarray(direction, dtype=float)
    length = np.linalg.norm(direction)
    if direction.shape != (3,) or length == 0:
        raise ValueError("direction must be a non-zero vector in R^3")
    direction = direction / length

    if profile == "zero":
        return VectorField.zeros(grid)
    if profile == "bump":
        shape = CutoffProfile(width / OUTER_RADIUS, dimension=grid.dimension).on_grid(grid)
    elif profile == "gaussian":
        shape = np.exp(-(grid.radius_map**2) / width**2)
    else:
        n = grid.radius
        shape = np.prod(np.sin(np.pi * (grid.coords + n) / (2.0 * n)), axis=-1)

    return VectorField(grid, amplitude * shape[..., None] * direction)
