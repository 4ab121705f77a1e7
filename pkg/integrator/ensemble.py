"""
Ensemble results and the deterministic block runner.

Trajectories are partitioned into blocks of a size fixed by the config, never
by the worker count. Blocks run serially or on a thread pool and are merged
in block order, which makes every report bit-identical for any thread count.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from configs import DETERMINISTIC_ENV
from field_ops import NormReport
from measure_lab.observables import NORM_NAMES, ObservableRecord, parse_tail_name
from utils.errors import BlowUpError

logger = logging.getLogger(__name__)


def resolve_threads(threads):
    """Worker count: ``0``/``None`` means all cores; the env switch forces one."""
    if os.environ.get(DETERMINISTIC_ENV) == "1":
        return 1
    if not threads:
        return os.cpu_count() or 1
    return max(1, int(threads))


def run_blocks(tasks, threads):
    """Evaluate zero-argument callables, returning results in task order."""
    workers = min(resolve_threads(threads), max(1, len(tasks)))
    if workers == 1:
        return [task() for task in tasks]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [executor.submit(task) for task in tasks]
        return [future.result() for future in futures]


@dataclass
class EnsembleResult:
    """Sampled observables of ``M`` trajectories.

    Attributes
    ----------
    times : numpy.ndarray
        Sample times, shape ``(S,)``.
    observables : dict[str, numpy.ndarray]
        Observable streams, each ``(M, S)``; ``NaN`` after a failure.
    failed : numpy.ndarray
        Boolean flags, shape ``(M,)``.
    last_finite_time : numpy.ndarray
        Last time each trajectory was finite (``horizon`` when it never failed).
    trajectory_ids, intensities : numpy.ndarray
        Wiener stream id and noise intensity of every member.
    group_size : int
        Members sharing one Wiener stream (1 for independent ensembles).
    probes : dict[str, numpy.ndarray]
        Extra per-sample features, each ``(M, S, P)``.
    pairs : list[tuple[int, int]]
        Member pairs, indexed within a group, whose differences are tracked.
    pair_differences : dict[str, numpy.ndarray]
        ``"l2"`` and ``"h1"`` squared norms of member differences, each
        ``(groups, len(pairs), S)``.
    """

    times: np.ndarray
    observables: dict
    failed: np.ndarray
    last_finite_time: np.ndarray
    trajectory_ids: np.ndarray
    intensities: np.ndarray
    forcing_energy_unit: float = 0.0
    cubic_coefficient: float = 1.0
    dt: float = 0.0
    spacing: float = 0.0
    group_size: int = 1
    experimental: bool = False
    monitor_activations: np.ndarray = None
    probes: dict = field(default_factory=dict)
    pairs: list = field(default_factory=list)
    pair_differences: dict = field(default_factory=dict)
    final_values: np.ndarray = None

    @property
    def size(self):
        return len(self.failed)

    @property
    def names(self):
        return tuple(self.observables)

    def forcing_energy(self, member=0):
        """``eps^2 sum ||f_k||^2`` at the member's intensity."""
        return float(self.intensities[member] ** 2 * self.forcing_energy_unit)

    def mean(self, name):
        """Ensemble mean over the trajectories that never failed."""
        alive = ~self.failed
        return np.mean(self.observables[name][alive], axis=0)

    def records(self, member):
        """:class:`ObservableRecord` stream of one trajectory."""
        out = []
        for s, t in enumerate(self.times):
            norms = NormReport(**{name: float(self.observables[name][member, s]) for name in NORM_NAMES})
            tails = {
                name: float(values[member, s])
                for name, values in self.observables.items()
                if parse_tail_name(name) is not None
            }
            out.append(ObservableRecord(float(t), norms, tails, self.forcing_energy(member)))
        return out

    def sup_pair_differences(self, norm="h1"):
        """``sup_t ||u_i - u_j||`` per group and pair, shape ``(groups, pairs)``."""
        return np.sqrt(np.max(self.pair_differences[norm], axis=-1))

    def raise_for_failures(self):
        if self.failed.any():
            ids = [int(i) for i in np.flatnonzero(self.failed)]
            raise BlowUpError(
                f"{len(ids)} trajectories produced non-finite values",
                float(np.min(self.last_finite_time[self.failed])),
                ids,
            )

    def to_frame(self):
        """Long table with one row per (trajectory, time, statistic)."""
        frames = []
        for name, values in self.observables.items():
            frames.append(
                pd.DataFrame(
                    {
                        "trajectory": np.repeat(np.arange(self.size), len(self.times)),
                        "time": np.tile(self.times, self.size),
                        "statistic": name,
                        "value": values.ravel(),
                    }
                )
            )
        return pd.concat(frames, ignore_index=True)

    # ------------------------------------------------------------------
    # Merging
    # ------------------------------------------------------------------

    @classmethod
    def concatenate(cls, parts):
        """Merge block results in the given order."""
        first = parts[0]

        def stack(getter):
            return np.concatenate([getter(p) for p in parts], axis=0)

        merged = cls(
            times=first.times,
            observables={name: stack(lambda p: p.observables[name]) for name in first.observables},
            failed=stack(lambda p: p.failed),
            last_finite_time=stack(lambda p: p.last_finite_time),
            trajectory_ids=stack(lambda p: p.trajectory_ids),
            intensities=stack(lambda p: p.intensities),
            forcing_energy_unit=first.forcing_energy_unit,
            cubic_coefficient=first.cubic_coefficient,
            dt=first.dt,
            spacing=first.spacing,
            group_size=first.group_size,
            experimental=first.experimental,
            monitor_activations=stack(lambda p: p.monitor_activations),
            probes={name: stack(lambda p: p.probes[name]) for name in first.probes},
            pairs=list(first.pairs),
            pair_differences={
                name: stack(lambda p: p.pair_differences[name]) for name in first.pair_differences
            },
            final_values=None if first.final_values is None else stack(lambda p: p.final_values),
        )
        failures = int(merged.failed.sum())
        if failures:
            logger.warning("%d of %d trajectories failed", failures, merged.size)
        return merged
