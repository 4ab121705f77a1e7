"""
Strong self-convergence on refined Wiener paths.
"""

import logging
from dataclasses import dataclass

import numpy as np

from field_ops import norm_values
from .llb_integrator import LLBIntegrator

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StrongConvergence:
    dts: tuple
    errors: tuple
    slope: float
    dt_reference: float


def _final_states(config, u0, trajectories, threads):
    integrator = LLBIntegrator(config)
    result = integrator.simulate_ensemble(u0, trajectories, threads=threads, keep_final=True)
    result.raise_for_failures()
    return integrator.grid, result.final_values


def strong_convergence(config, u0, dts, dt_reference, trajectories, threads=None):
    """Root-mean-square L^2 error at the horizon against a fine reference.

    Every coarse run at ``dt`` draws ``dt / dt_reference`` fine increments per
    step from the same streams as the reference, so all runs see the same
    Brownian paths.

    Returns
    -------
    StrongConvergence
        Errors per ``dt`` and the fitted log-log slope (the strong order).
    """
    def resolved(dt, substeps):
        steps = int(round(config.horizon / dt))
        return config.updated(dt=dt, fine_substeps=substeps, sample_stride=max(1, steps))

    grid, reference = _final_states(resolved(dt_reference, 1), u0, trajectories, threads)
    errors = []
    for dt in dts:
        ratio = dt / dt_reference
        if abs(ratio - round(ratio)) > 1e-9 * ratio:
            raise ValueError(f"dt={dt} is not a multiple of the reference step {dt_reference}")
        _, coarse = _final_states(resolved(dt, int(round(ratio))), u0, trajectories, threads)
        squared = norm_values(coarse - reference, grid)["l2"]
        errors.append(float(np.sqrt(np.mean(squared))))
        logger.info("strong error at dt=%g: %.3e", dt, errors[-1])

    slope = float(np.polyfit(np.log(dts), np.log(errors), 1)[0])
    return StrongConvergence(tuple(dts), tuple(errors), slope, dt_reference)
