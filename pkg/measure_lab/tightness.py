"""
Tightness diagnostics: weighted quantiles of the H^1 tail masses.
"""

from dataclasses import dataclass

import numpy as np

from configs import TIGHTNESS_QUANTILE
from utils.errors import ObservableError
from .observables import tail_name


@dataclass(frozen=True)
class TightnessProfile:
    ladder: tuple
    quantiles: tuple
    level: float
    experimental: bool = False


def weighted_quantile(values, weights, level):
    """Smallest sample ``v`` with cumulative weight of ``{values <= v}`` at least ``level``."""
    order = np.argsort(values, kind="stable")
    cumulative = np.cumsum(weights[order])
    index = int(np.searchsorted(cumulative, level * cumulative[-1] - 1e-15, side="left"))
    return float(values[order][min(index, len(values) - 1)])


def tightness_profile(measure, m_ladder, level=TIGHTNESS_QUANTILE):
    """Per-radius ``level`` quantile of ``int_{|x| > m} |u|^2 + |grad u|^2``.

    Radii at or beyond the grid radius have an empty tail region and get 0.

    Raises
    ------
    ObservableError
        If a ladder radius inside the grid has no H^1 tail observable.
    """
    radius = measure.metadata.get("radius", np.inf)
    quantiles = []
    for m in m_ladder:
        if m >= radius:
            quantiles.append(0.0)
            continue
        name = tail_name("H1", m)
        if name not in measure.names:
            raise ObservableError(f"measure has no {name!r} observable")
        quantiles.append(weighted_quantile(measure.column(name), measure.weights, level))
    return TightnessProfile(
        tuple(float(m) for m in m_ladder),
        tuple(quantiles),
        float(level),
        bool(measure.metadata.get("experimental", False)),
    )


def common_tight_radius(profiles, threshold):
    """Smallest ladder radius whose quantile is below ``threshold`` in every profile."""
    ladder = profiles[0].ladder
    for i, m in enumerate(ladder):
        if all(p.quantiles[i] < threshold for p in profiles):
            return m
    return None
