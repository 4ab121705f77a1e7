"""
Bounded-Lipschitz distance on a fixed dictionary of clipped ramps.

Test functions are ``z -> clip(<w, z> - c, 0, 1)`` with unit directions ``w``
(the coordinate axes plus a seeded set of random directions) and all offsets
``c``. For each direction the supremum over ``c`` is attained at a
breakpoint and is found exactly from sorted prefix sums. The estimate is a
lower bound of the true distance and a pseudometric in its own right.
"""

import numpy as np

from configs import BL_DICTIONARY_SEED, BL_DICTIONARY_SIZE
from utils.errors import ObservableError


def ramp_directions(dimension, size=BL_DICTIONARY_SIZE, seed=BL_DICTIONARY_SEED):
    """Coordinate axes followed by ``size`` random unit vectors."""
    rng = np.random.default_rng(seed)
    random = rng.standard_normal((size, dimension))
    random /= np.linalg.norm(random, axis=1, keepdims=True)
    return np.vstack([np.eye(dimension), random])


def _positive_part_sums(points, weights, offsets):
    """``S(c) = sum_i w_i max(p_i - c, 0)`` for every offset ``c``."""
    order = np.argsort(points, kind="stable")
    points = points[order]
    weights = weights[order]
    # suffix sums over the points strictly above the offset
    mass = np.concatenate([np.cumsum(weights[::-1])[::-1], [0.0]])
    moment = np.concatenate([np.cumsum((weights * points)[::-1])[::-1], [0.0]])
    index = np.searchsorted(points, offsets, side="right")
    return moment[index] - offsets * mass[index]


def ramp_discrepancy(p1, w1, p2, w2):
    """``sup_c |int clip(p - c, 0, 1) d(mu1 - mu2)|`` for projected samples."""
    points = np.concatenate([p1, p2])
    weights = np.concatenate([w1, -w2])
    offsets = np.concatenate([points, points - 1.0])
    values = _positive_part_sums(points, weights, offsets) - _positive_part_sums(points, weights, offsets + 1.0)
    return float(np.max(np.abs(values))) if len(values) else 0.0


def bl_distance(mu1, mu2, size=BL_DICTIONARY_SIZE, seed=BL_DICTIONARY_SEED):
    """Dictionary estimate of the bounded-Lipschitz distance.

    Raises
    ------
    ObservableError
        If the measures are defined on different observables.
    """
    if tuple(mu1.names) != tuple(mu2.names):
        raise ObservableError(f"observable mismatch: {mu1.names} vs {mu2.names}")
    directions = ramp_directions(len(mu1.names), size, seed)
    best = 0.0
    for w in directions:
        best = max(best, ramp_discrepancy(mu1.samples @ w, mu1.weights, mu2.samples @ w, mu2.weights))
    return best
