"""
Time-averaged occupation measures on the observable space.

The measure ``mu_T(Gamma) = 1/T int P(u(t) in Gamma) dt`` is approximated by
uniformly weighted samples of the observable vector over the averaging
window and over independent seeds.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from utils.errors import ObservableError

logger = logging.getLogger(__name__)

_WEIGHT_TOLERANCE = 1e-12


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Weighted point cloud on the observable space.

    Parameters
    ----------
    names : tuple[str, ...]
        Observable defining each coordinate.
    samples : numpy.ndarray
        Shape ``(N, len(names))``.
    weights : numpy.ndarray
        Non-negative weights summing to one.
    metadata : dict
        Intensity, seed count, window, grid radius and flags.
    """

    names: tuple
    samples: np.ndarray
    weights: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        samples = np.atleast_2d(np.asarray(self.samples, dtype=float))
        weights = np.asarray(self.weights, dtype=float)
        if samples.shape != (len(weights), len(self.names)):
            raise ObservableError(
                f"{samples.shape} samples for {len(weights)} weights and {len(self.names)} observables"
            )
        if np.any(weights < 0):
            raise ValueError("measure weights must be non-negative")
        if abs(weights.sum() - 1.0) > _WEIGHT_TOLERANCE:
            raise ValueError(f"measure weights sum to {weights.sum()}, expected 1")
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def uniform(cls, names, samples, metadata=None):
        samples = np.atleast_2d(np.asarray(samples, dtype=float))
        weights = np.full(len(samples), 1.0 / len(samples))
        return cls(tuple(names), samples, weights, dict(metadata or {}))

    @classmethod
    def point_mass(cls, names, vector, metadata=None):
        return cls.uniform(names, np.asarray(vector, dtype=float)[None], metadata)

    @property
    def size(self):
        return len(self.weights)

    def column(self, name):
        if name not in self.names:
            raise ObservableError(f"measure has no observable {name!r}")
        return self.samples[:, self.names.index(name)]

    def expectation(self, name):
        return float(np.dot(self.weights, self.column(name)))

    def select(self, names):
        """Marginal on a subset of observables."""
        columns = [self.names.index(n) if n in self.names else None for n in names]
        if None in columns:
            missing = [n for n, c in zip(names, columns) if c is None]
            raise ObservableError(f"measure has no observables {missing}")
        return EmpiricalMeasure(tuple(names), self.samples[:, columns], self.weights, dict(self.metadata))

    def to_dict(self):
        return {
            "names": list(self.names),
            "samples": self.samples.tolist(),
            "weights": self.weights.tolist(),
            "metadata": dict(self.metadata),
        }


def kb_measure(integrator, u0, t_burn, t_avg, trajectories, threads=None, first_id=0, names=None):
    """Krylov-Bogoliubov occupation measure of ``trajectories`` seeds.

    Samples every observable at the integrator's stride on
    ``[t_burn, t_burn + t_avg]``; ``t_avg = 0`` gives the law at ``t_burn``.
    Seeds are ``first_id .. first_id + trajectories - 1`` so disjoint seed
    sets can be compared.
    """
    if t_burn < 0 or t_avg < 0:
        raise ValueError("burn-in and averaging window must be non-negative")
    runner = integrator.with_horizon(t_burn + t_avg)
    result = runner.simulate_ensemble(u0, trajectories, threads=threads, first_id=first_id)
    alive = ~result.failed
    window = result.times >= t_burn - 1e-9 * max(1.0, t_burn)
    names = tuple(names or runner.names)
    columns = [result.observables[name][alive][:, window].ravel() for name in names]
    samples = np.stack(columns, axis=1) if columns else np.zeros((0, 0))
    if len(samples) == 0:
        raise ObservableError("no surviving samples in the averaging window")

    metadata = {
        "eps": float(runner.basis.intensity),
        "seeds": int(alive.sum()),
        "first_id": int(first_id),
        "t_burn": float(t_burn),
        "t_avg": float(t_avg),
        "radius": float(runner.config.radius),
        "experimental": bool(runner.config.experimental),
        "failed": int(result.failed.sum()),
    }
    logger.info("occupation measure at eps=%g: %d samples", metadata["eps"], len(samples))
    return EmpiricalMeasure.uniform(names, samples, metadata)


def occupation_frequency(measure, name, threshold):
    """Weight of the half-space ``{name <= threshold}``."""
    return float(np.sum(measure.weights[measure.column(name) <= threshold]))
