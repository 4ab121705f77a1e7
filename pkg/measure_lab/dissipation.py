"""
Dissipation estimates and their fitted constants.

The H^1 bound has the shape ``E||u(t)||_{H^1}^2 <= C e^{-t} ||u_0||_{H^1}^2 + C``
with ``C`` depending only on the noise; the fits below measure the smallest
``C`` consistent with the sampled means, per initial amplitude and overall.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid

from configs import DEFAULT_DISSIPATION_CEILING

_TINY = 1e-300


@dataclass(frozen=True)
class DissipationFit:
    """Fitted constant of a dissipation bound.

    ``spread`` is the ratio of the largest to the smallest per-amplitude
    constant (1 when fewer than two amplitudes have a positive constant, as
    when a run stays at zero).
    """

    constant: float
    per_amplitude: tuple
    initial_norms: tuple
    ceiling: float

    @property
    def passed(self):
        return bool(np.isfinite(self.constant) and self.constant <= self.ceiling)

    @property
    def spread(self):
        positive = [c for c in self.per_amplitude if c > 0]
        if len(positive) < 2:
            return 1.0
        return max(positive) / min(positive)


@dataclass(frozen=True)
class GronwallCheck:
    times: np.ndarray
    mean: np.ndarray
    bound: np.ndarray
    standard_error: np.ndarray

    @property
    def within(self):
        return self.mean <= self.bound + 3.0 * self.standard_error + 1e-12 * (1.0 + self.bound)

    @property
    def passed(self):
        return bool(np.all(self.within))


def _alive_mean(ensemble, name):
    values = ensemble.observables[name][~ensemble.failed]
    return np.mean(values, axis=0)


def dissipation_bound_check(ensembles, ceiling=DEFAULT_DISSIPATION_CEILING):
    """Fit ``C`` in ``E||u(t)||_{H^1}^2 <= C e^{-t} a + C`` over all runs.

    ``a`` is the H^1 norm of each run's (cut-off) initial datum. A run whose
    mean vanishes identically fits ``C = 0``.
    """
    if len(ensembles) < 2:
        raise ValueError(f"the fit needs runs from at least two amplitudes, got {len(ensembles)}")
    constants = []
    initial = []
    for ensemble in ensembles:
        mean = _alive_mean(ensemble, "h1")
        a = float(mean[0])
        shape = np.exp(-ensemble.times) * a + 1.0
        constants.append(float(np.max(mean / shape)))
        initial.append(a)
    return DissipationFit(max(constants), tuple(constants), tuple(initial), float(ceiling))


def l2_gronwall_check(ensemble):
    """Compare ``E||u(t)||^2`` with ``e^{-t}||u(0)||^2 + F (1 - e^{-t})``.

    ``F = eps^2 sum_k ||f_k||^2`` is the noise input; the bound follows from
    the energy balance by dropping the gradient and quartic terms.
    """
    alive = ~ensemble.failed
    values = ensemble.observables["l2"][alive]
    count = values.shape[0]
    mean = np.mean(values, axis=0)
    error = np.std(values, axis=0, ddof=1) / np.sqrt(count) if count > 1 else np.zeros_like(mean)
    forcing = float(np.mean(ensemble.intensities[alive] ** 2)) * ensemble.forcing_energy_unit
    decay = np.exp(-ensemble.times)
    bound = decay * mean[0] + forcing * (1.0 - decay)
    return GronwallCheck(ensemble.times, mean, bound, error)


def integrated_dissipation_check(ensembles, ceiling=DEFAULT_DISSIPATION_CEILING):
    """Fit ``C`` in ``int_0^t E(||u||_{H^2}^2 + int |u|^2 |grad u|^2) ds <= C a + C t``."""
    if not ensembles:
        raise ValueError("at least one ensemble is required")
    constants = []
    initial = []
    for ensemble in ensembles:
        density = _alive_mean(ensemble, "h2") + _alive_mean(ensemble, "cross_energy")
        accumulated = cumulative_trapezoid(density, ensemble.times, initial=0.0)
        a = float(_alive_mean(ensemble, "h1")[0])
        shape = a + ensemble.times
        ratio = np.where(shape > _TINY, accumulated / np.maximum(shape, _TINY), 0.0)
        constants.append(float(np.max(ratio)))
        initial.append(a)
    return DissipationFit(max(constants), tuple(constants), tuple(initial), float(ceiling))


def absorbing_time(ensemble, level):
    """First sample time after which ``E||u||_{H^1}^2 <= level`` for good.

    Returns ``None`` when the last sample is still above ``level``.
    """
    mean = _alive_mean(ensemble, "h1")
    above = np.flatnonzero(mean > level)
    if len(above) == 0:
        return float(ensemble.times[0])
    if above[-1] == len(mean) - 1:
        return None
    return float(ensemble.times[above[-1] + 1])
