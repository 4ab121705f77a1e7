"""
Closed-form reference for the linear additive-noise equation

    du = (Lap u - u) dt + eps sum_k f_k dW_k,   u = 0 on the cube boundary.

Projected on a Dirichlet eigenfunction ``e_j`` every component of
``<u, e_j>`` is an Ornstein-Uhlenbeck process with rate ``lambda_j + 1``,
so its stationary variance is known exactly. Variances here are summed over
the three components.
"""

import logging
from dataclasses import dataclass
from functools import cached_property
from itertools import product

import numpy as np

from configs import ORACLE_RESOLUTION_LIMIT
from field_ops import VectorField
from field_ops.identities import dirichlet_sine
from integrator import LLBIntegrator
from utils.errors import OracleError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModeComparison:
    mode: int
    index: tuple
    eigenvalue: float
    empirical: float
    analytic: float
    relative_error: float
    mean: float
    mean_error: float
    experimental: bool = False

    def to_dict(self):
        return {
            "mode": self.mode,
            "index": list(self.index),
            "eigenvalue": self.eigenvalue,
            "empirical": self.empirical,
            "analytic": self.analytic,
            "relative_error": self.relative_error,
            "mean": self.mean,
            "mean_error": self.mean_error,
            "experimental": self.experimental,
        }


class LinearOracle:
    """Dirichlet eigenpairs of ``-Lap`` on ``[-n, n]^d`` and OU statistics.

    Mode ``j`` is a positive integer. In 2-D it enumerates the index pairs
    ``(j1, j2)`` by increasing eigenvalue, ties broken lexicographically.
    """

    def __init__(self, grid, basis):
        self.grid = grid
        self.basis = basis

    @cached_property
    def _indices(self):
        top = self.grid.cells_per_axis - 1
        pairs = product(range(1, top + 1), repeat=self.grid.dimension)
        return sorted(pairs, key=lambda index: (sum(i * i for i in index), index))

    def index(self, j):
        if j < 1 or j > len(self._indices):
            raise OracleError(f"mode {j} is not a Dirichlet mode of {self.grid!r}")
        return self._indices[j - 1]

    def eigenvalue(self, j):
        """``lambda_j = sum_i (j_i pi / (2n))^2``.

        Raises
        ------
        OracleError
            If ``lambda_j h^2`` exceeds the resolution limit.
        """
        index = self.index(j)
        value = sum((i * np.pi / (2.0 * self.grid.radius)) ** 2 for i in index)
        if value * self.grid.spacing**2 > ORACLE_RESOLUTION_LIMIT:
            raise OracleError(
                f"mode {j} is under-resolved: lambda h^2 = {value * self.grid.spacing**2:.3g} "
                f"> {ORACLE_RESOLUTION_LIMIT}"
            )
        return float(value)

    def eigenfunction(self, j):
        """``e_j`` normalised to unit L^2 norm, shape ``grid.shape``."""
        return dirichlet_sine(self.grid, self.index(j)) / self.grid.radius ** (self.grid.dimension / 2.0)

    def projection(self, j):
        """``<f_k, e_j>`` per mode and component, shape ``(K, 3)``."""
        weighted = self.grid.quadrature_weights * self.eigenfunction(j)
        axes = tuple(range(1, self.grid.dimension + 1))
        return np.tensordot(self.basis.modes, weighted, axes=(axes, tuple(range(self.grid.dimension))))

    @property
    def projections(self):
        """Projections of the first resolved modes, ``{j: (K, 3)}``."""
        out = {}
        for j in range(1, len(self._indices) + 1):
            try:
                self.eigenvalue(j)
            except OracleError:
                break
            out[j] = self.projection(j)
        return out

    def stationary_variance(self, j):
        """``eps^2 sum_k |<f_k, e_j>|^2 / (2 (lambda_j + 1))``."""
        rate = self.eigenvalue(j) + 1.0
        g = self.projection(j)
        return float(self.basis.intensity**2 * np.sum(g**2) / (2.0 * rate))

    def orthogonality_defect(self, count):
        """Largest entry of ``|Gram - I|`` for the first ``count`` eigenfunctions."""
        modes = np.stack([self.eigenfunction(j).ravel() for j in range(1, count + 1)])
        gram = (modes * self.grid.quadrature_weights.ravel()) @ modes.T
        return float(np.max(np.abs(gram - np.eye(count))))


def oracle_stationary_variance(j, basis):
    return LinearOracle(basis.grid, basis).stationary_variance(j)


def oracle_compare(config, basis=None, modes=(1, 2, 3), t_avg=50.0, t_burn=5.0, trajectories=64, threads=None):
    """Empirical vs analytic stationary variance of the listed modes.

    The integrator runs ``config`` with the nonlinear switches off from zero
    initial data; ``<u(t), e_j>`` is recorded at every sample in
    ``[t_burn, t_burn + t_avg]`` and its second moment averaged over time and
    seeds.
    """
    linear = config.linear().updated(horizon=t_burn + t_avg)
    integrator = LLBIntegrator(linear, basis)
    oracle = LinearOracle(integrator.grid, integrator.basis)
    analytic = [oracle.stationary_variance(j) for j in modes]
    weighted = np.stack([integrator.grid.quadrature_weights * oracle.eigenfunction(j) for j in modes])
    spatial = tuple(range(1, integrator.grid.dimension + 1))

    def probe(values):
        projected = np.tensordot(values, weighted, axes=(spatial, spatial))  # (B, 3, J)
        return np.swapaxes(projected, 1, 2).reshape(len(values), -1)

    result = integrator.simulate_ensemble(VectorField.zeros(integrator.grid), trajectories, threads, probe=probe)
    result.raise_for_failures()
    window = result.times >= t_burn - 1e-9 * max(1.0, t_burn)
    features = result.probes["probe"][:, window].reshape(result.size, -1, len(modes), 3)

    comparisons = []
    for i, j in enumerate(modes):
        coefficients = features[:, :, i, :]
        empirical = float(np.mean(np.sum(coefficients**2, axis=-1)))
        per_seed = np.mean(coefficients, axis=1)
        mean = float(np.max(np.abs(np.mean(per_seed, axis=0))))
        spread = np.std(per_seed, axis=0, ddof=1) if result.size > 1 else np.zeros(3)
        mean_error = float(np.max(spread) / np.sqrt(result.size))
        if analytic[i] > 0:
            error = abs(empirical - analytic[i]) / analytic[i]
        else:
            error = 0.0 if empirical == 0.0 else float("inf")
        comparisons.append(
            ModeComparison(
                mode=int(j),
                index=tuple(oracle.index(j)),
                eigenvalue=oracle.eigenvalue(j),
                empirical=empirical,
                analytic=analytic[i],
                relative_error=float(error),
                mean=mean,
                mean_error=mean_error,
                experimental=linear.experimental,
            )
        )
        logger.info("mode %d: empirical %.4g vs analytic %.4g", j, empirical, analytic[i])
    return comparisons
