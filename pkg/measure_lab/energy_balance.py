"""
Monte Carlo check of the L^2 energy balance

    d/dt E||u||^2 + 2 E(||grad u||^2 + ||u||^2 + kappa ||u||_4^4) = eps^2 sum_k ||f_k||^2.

Precession drops out and the Ito correction cancels the quadratic variation
of the multiplicative noise, so the balance holds exactly in the continuum;
the residual measures the discretisation error plus Monte Carlo noise.
"""

from dataclasses import dataclass

import numpy as np
import pandas as pd

from configs import MIN_ENERGY_BALANCE_ENSEMBLE
from utils.errors import InsufficientEnsembleError, ObservableError

PASS_FRACTION = 0.95


@dataclass(frozen=True)
class EnergyBalance:
    times: np.ndarray
    residual: np.ndarray
    error_bar: np.ndarray
    budget: np.ndarray
    within: np.ndarray

    @property
    def fraction_within(self):
        return float(np.mean(self.within)) if len(self.within) else 1.0

    @property
    def passed(self):
        return self.fraction_within >= PASS_FRACTION

    def to_frame(self):
        return pd.DataFrame(
            {
                "time": self.times,
                "residual": self.residual,
                "error_bar": self.error_bar,
                "budget": self.budget,
                "within": self.within,
            }
        )


def energy_balance_residual(ensemble, budget_scale=1.0, min_trajectories=MIN_ENERGY_BALANCE_ENSEMBLE):
    """Residual of the balance at every interior sample time.

    The time derivative is a central difference of each trajectory's
    ``||u||^2`` stream, so the per-trajectory residuals carry the martingale
    noise and their standard error is the Monte Carlo error bar. A sample
    passes when ``|mean residual| <= 3 (error bar + budget)`` with
    ``budget = budget_scale (dt + h)`` times the magnitude of the balance terms.

    Raises
    ------
    InsufficientEnsembleError
        With fewer than ``min_trajectories`` surviving trajectories.
    """
    for name in ("l2", "grad", "l4"):
        if name not in ensemble.observables:
            raise ObservableError(f"energy balance needs the {name!r} observable")
    alive = ~ensemble.failed
    count = int(alive.sum())
    if count < min_trajectories:
        raise InsufficientEnsembleError(
            f"energy balance needs at least {min_trajectories} trajectories, got {count}"
        )
    if len(ensemble.times) < 3:
        raise InsufficientEnsembleError("energy balance needs at least three sample times")

    l2 = ensemble.observables["l2"][alive]
    grad = ensemble.observables["grad"][alive]
    l4 = ensemble.observables["l4"][alive]
    spacing = ensemble.times[1] - ensemble.times[0]
    forcing = ensemble.intensities[alive] ** 2 * ensemble.forcing_energy_unit

    derivative = (l2[:, 2:] - l2[:, :-2]) / (2.0 * spacing)
    dissipation = 2.0 * (grad + l2 + ensemble.cubic_coefficient * l4)[:, 1:-1]
    per_trajectory = derivative + dissipation - forcing[:, None]

    residual = np.mean(per_trajectory, axis=0)
    error_bar = np.std(per_trajectory, axis=0, ddof=1) / np.sqrt(count)
    magnitude = np.abs(np.mean(derivative, axis=0)) + np.mean(dissipation, axis=0) + np.mean(forcing)
    budget = budget_scale * (ensemble.dt + ensemble.spacing) * magnitude
    within = np.abs(residual) <= 3.0 * (error_bar + budget)
    return EnergyBalance(ensemble.times[1:-1], residual, error_bar, budget, within)
