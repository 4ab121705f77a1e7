"""
Continuity in the initial data on a shared Wiener path.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class ContinuityReport:
    """``sup_t ||u_a(t) - u_b(t)||^2 / ||u_a(0) - u_b(0)||^2`` per seed.

    For identical initial data the ratio is undefined; ``identical`` is set,
    ``ratios`` hold 0 and ``sup_differences`` report the (zero) differences
    directly.
    """

    ratios: np.ndarray
    sup_differences: np.ndarray
    initial_gap: float
    identical: bool

    @property
    def median(self):
        return float(np.nanmedian(self.ratios))

    @property
    def maximum(self):
        return float(np.nanmax(self.ratios))


def initial_data_continuity(integrator, u0_a, u0_b, trajectories, threads=None):
    """Gronwall ratio of two solutions driven by the same noise."""
    eps = integrator.basis.intensity
    result = integrator.simulate_group([u0_a, u0_b], [eps, eps], trajectories, threads)
    squared = result.pair_differences["l2"][:, 0, :]
    gap = float(np.nanmax(squared[:, 0]))
    sup = np.max(squared, axis=1)
    if gap == 0.0:
        return ContinuityReport(np.zeros_like(sup), sup, 0.0, True)
    return ContinuityReport(sup / gap, sup, gap, False)
