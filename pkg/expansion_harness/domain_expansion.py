"""
Domain expansion: solve on growing cubes, cut off, zero-extend, compare.

For each radius ``n`` the equation is solved on ``[-n, n]^d`` from
``theta_n u0`` with noise modes ``theta_n f_k``; ``v^n = theta_n u^n`` is
zero-extended onto the largest grid, where differences and tails are
measured. Trajectory ids, and hence Wiener streams, are shared by all radii.
"""

import logging
from dataclasses import asdict, dataclass

import numpy as np
import pandas as pd

from configs import EXPANSION_CHUNK
from field_ops import norm_values, tail_values
from grid_cutoff import CutoffProfile
from integrator import LLBIntegrator
from noise_model import build_basis
from utils.errors import GridMismatchError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExpansionReport:
    """Pathwise comparison of ``v^n`` across radii.

    Attributes
    ----------
    radii : tuple[float, ...]
        Radii ``n_1 <= n_2 <= ...``.
    times : tuple[float, ...]
        Sample times; suprema in time are taken over these.
    differences : numpy.ndarray
        ``sup_t ||v^{n_i} - v^{n_{i+1}}||`` per consecutive pair and seed,
        shape ``(len(radii) - 1, M)``.
    median_differences : tuple[float, ...]
        Median over seeds of ``differences``.
    ladder : tuple[float, ...]
        Tail radii ``m``.
    tail_profiles : numpy.ndarray
        ``E sup_t int_{|x| > m} |v^n|^2``, shape ``(len(radii), len(ladder))``.
    failed : int
        Trajectories that blew up on any radius (excluded from statistics).
    experimental : bool
        ``True`` for two-dimensional runs.
    embedding_defect : float
        Largest change of ``||v^n||^2`` under zero extension (rounding only).
    """

    radii: tuple
    times: tuple
    differences: np.ndarray
    median_differences: tuple
    ladder: tuple
    tail_profiles: np.ndarray
    failed: int = 0
    experimental: bool = False
    embedding_defect: float = 0.0

    def to_frame(self):
        rows = []
        for i, median in enumerate(self.median_differences):
            rows.append(
                {
                    "statistic": "sup_l2_difference",
                    "radius": self.radii[i],
                    "partner": self.radii[i + 1],
                    "m": np.nan,
                    "value": median,
                }
            )
        for r, radius in enumerate(self.radii):
            for j, m in enumerate(self.ladder):
                rows.append(
                    {
                        "statistic": "tail_l2",
                        "radius": radius,
                        "partner": np.nan,
                        "m": m,
                        "value": float(self.tail_profiles[r, j]),
                    }
                )
        return pd.DataFrame(rows, columns=["statistic", "radius", "partner", "m", "value"])

    def to_dict(self):
        return {
            "radii": list(self.radii),
            "times": list(self.times),
            "median_differences": list(self.median_differences),
            "differences": self.differences.tolist(),
            "ladder": list(self.ladder),
            "tail_profiles": self.tail_profiles.tolist(),
            "failed": self.failed,
            "experimental": self.experimental,
            "embedding_defect": self.embedding_defect,
        }


@dataclass(frozen=True)
class TailUniformity:
    """Outcome of the n-uniform tail search.

    ``m_star`` is ``None`` (and ``exceeds_ladder`` set) when no ladder radius
    brings every tail below the target. ``per_radius`` holds the same search
    for each radius alone; ``uniform`` records that it never increases with
    the radius.
    """

    m_star: float | None
    exceeds_ladder: bool
    per_radius: tuple
    uniform: bool

    def to_dict(self):
        return asdict(self)


class DomainExpansionHarness:
    """Run one configuration on a ladder of radii.

    Parameters
    ----------
    base : SimConfig
        Configuration whose ``radius`` is replaced by each ladder radius.
    threads : int | None
        Worker threads per ensemble (``0``/``None`` for all cores).
    chunk : int
        Trajectories simulated together; only the cut-off paths of one chunk
        on two consecutive radii are held in memory.
    """

    def __init__(self, base, threads=None, chunk=EXPANSION_CHUNK):
        if chunk < 1:
            raise ValueError(f"chunk must hold at least one trajectory, got {chunk}")
        self.base = base
        self.threads = threads
        self.chunk = int(chunk)

    def _config_for(self, radius):
        ladder = tuple(m for m in self.base.tail_ladder if m < radius) or (0.0,)
        return self.base.updated(radius=radius, tail_ladder=ladder)

    def integrator_for(self, radius):
        """Integrator on ``[-n, n]^d`` driven by the cut-off modes ``theta_n f_k``."""
        config = self._config_for(radius)
        basis = build_basis(config.make_grid(), config.modes, config.preset, config.intensity, config.bump_radius)
        return LLBIntegrator(config, basis.localized(CutoffProfile(radius, dimension=config.dimension)))

    def cut_off_paths(self, radius, u0, largest, trajectories, first_id=0):
        """Sampled ``v^n = theta_n u^n`` zero-extended onto ``largest``.

        Returns
        -------
        result : EnsembleResult
            The run on the radius' own grid.
        fields : numpy.ndarray
            Shape ``(M, S, *largest.shape, 3)``; NaN for failed trajectories.
        defect : float
            Largest gap between ``||v^n||^2`` on its own grid and after zero
            extension.
        """
        integrator = self.integrator_for(radius)
        grid = integrator.grid
        try:
            grid.offset_in(largest)
        except GridMismatchError as exc:
            raise GridMismatchError(f"radius {radius} is not nested in {largest!r}: {exc}") from exc

        weights = CutoffProfile(radius, dimension=grid.dimension).on_grid(grid)[..., None]
        nested = grid.nested_slices(largest)

        def embedded(values):
            out = np.zeros((len(values),) + largest.shape + (3,))
            out[(slice(None),) + nested] = weights * values
            return out.reshape(len(values), -1)

        result = integrator.simulate_ensemble(
            u0, trajectories, threads=self.threads, probe=embedded, first_id=first_id
        )
        fields = result.probes["probe"].reshape((trajectories, len(result.times)) + largest.shape + (3,))
        own = norm_values(fields[(slice(None), slice(None)) + nested], grid)["l2"]
        extended = norm_values(fields, largest)["l2"]
        gaps = np.abs(own - extended)[~result.failed]
        defect = float(np.max(gaps)) if gaps.size else 0.0
        logger.info(
            "radius %g, trajectories %d-%d: %d failed",
            radius,
            first_id,
            first_id + trajectories - 1,
            int(result.failed.sum()),
        )
        return result, fields, defect

    def run_expansion(self, radii, u0, trajectories, ladder=None):
        """Simulate every radius and compare the cut-off solutions.

        Parameters
        ----------
        radii : sequence of float
            Non-decreasing radii; all grids must nest in the largest one.
        u0 : VectorField
            Initial data on the grid of the largest radius.
        trajectories : int
            Seeds ``0 .. M-1``, shared by all radii.
        ladder : sequence of float, optional
            Tail radii; defaults to the base config's ladder.
        """
        radii = tuple(float(r) for r in radii)
        if not radii:
            raise ValueError("at least one radius is required")
        if any(b < a for a, b in zip(radii, radii[1:])):
            raise ValueError(f"radii must be sorted, got {radii}")
        largest = self._config_for(radii[-1]).make_grid()
        if not u0.grid.same_frame(largest):
            raise GridMismatchError(f"initial data on {u0.grid!r}, largest radius needs {largest!r}")
        ladder = tuple(ladder if ladder is not None else self.base.tail_ladder)

        differences = np.full((len(radii) - 1, trajectories), np.nan)
        tail_sup = np.full((len(radii), trajectories, len(ladder)), np.nan)
        failed = np.zeros(trajectories, dtype=bool)
        defect = 0.0
        times = None
        for start in range(0, trajectories, self.chunk):
            stop = min(start + self.chunk, trajectories)
            previous = None
            for r, radius in enumerate(radii):
                result, fields, gap = self.cut_off_paths(radius, u0, largest, stop - start, first_id=start)
                failed[start:stop] |= result.failed
                defect = max(defect, gap)
                tail_sup[r, start:stop] = np.max(tail_values(fields, largest, ladder, "L2"), axis=1)
                if previous is not None:
                    gap_l2 = norm_values(previous - fields, largest)["l2"]
                    differences[r - 1, start:stop] = np.sqrt(np.max(gap_l2, axis=1))
                previous = fields
                times = result.times

        alive = ~failed
        differences[:, failed] = np.nan
        if alive.any():
            profiles = np.mean(tail_sup[:, alive], axis=1)
            medians = tuple(float(np.median(row[alive])) for row in differences)
        else:
            profiles = np.full((len(radii), len(ladder)), np.nan)
            medians = ()
        return ExpansionReport(
            radii=radii,
            times=tuple(float(t) for t in times),
            differences=differences,
            median_differences=medians,
            ladder=ladder,
            tail_profiles=profiles,
            failed=int(failed.sum()),
            experimental=self.base.experimental,
            embedding_defect=defect,
        )


def _first_below(profile, ladder, target):
    for m, value in zip(ladder, profile):
        if value < target:
            return m
    return None


def tail_uniformity(report, eps_target):
    """Smallest ladder radius whose tail is below ``eps_target`` for every radius."""
    if len(report.radii) < 2:
        raise ValueError("tail uniformity needs at least two radii")
    worst = np.max(report.tail_profiles, axis=0)
    m_star = _first_below(worst, report.ladder, eps_target)
    per_radius = tuple(_first_below(row, report.ladder, eps_target) for row in report.tail_profiles)

    uniform = True
    for a, b in zip(per_radius, per_radius[1:]):
        if a is not None and (b is None or b > a):
            uniform = False
    return TailUniformity(m_star, m_star is None, per_radius, uniform)
