"""
Counter-based Wiener increments.

Every trajectory owns a Philox stream keyed by ``(seed, trajectory_id)``, so
trajectories can be advanced in any order or on any worker and still replay
bit-exactly. Brownian-bridge refinements of a step draw from a second stream
keyed by the step and refinement depth, which leaves the main stream
untouched.
"""

from dataclasses import dataclass

import numpy as np

_BRIDGE_TAG = 1


def _generator(*key):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(k) for k in key])))


@dataclass(frozen=True)
class WienerIncrement:
    """Per-mode increments ``dW_k ~ N(0, dt)`` of one step."""

    values: np.ndarray
    dt: float
    trajectory_id: int
    step_index: int

    @property
    def count(self):
        return self.values.shape[-1]


class WienerStream:
    """Independent Brownian motions ``W_1 .. W_K`` of one trajectory.

    Parameters
    ----------
    seed : int
        Experiment seed.
    trajectory_id : int
        Identifier of the trajectory within the experiment.
    K : int
        Number of modes.
    substeps : int
        Each call to :meth:`next` sums ``substeps`` fine increments of
        variance ``dt / substeps``. A run at ``dt`` with ``substeps = r``
        sees exactly the summed path of a run at ``dt / r`` with one substep.
    """

    def __init__(self, seed, trajectory_id, K, substeps=1):
        if substeps < 1:
            raise ValueError(f"substeps must be >= 1, got {substeps}")
        self.seed = int(seed)
        self.trajectory_id = int(trajectory_id)
        self.count = int(K)
        self.substeps = int(substeps)
        self.step_index = 0
        self._rng = _generator(self.seed, self.trajectory_id)

    def __repr__(self):
        return f"WienerStream(seed={self.seed}, trajectory_id={self.trajectory_id}, K={self.count})"

    def next(self, dt):
        """Draw the increment of the next step."""
        fine = self._rng.standard_normal((self.substeps, self.count))
        values = np.sqrt(dt / self.substeps) * np.sum(fine, axis=0)
        increment = WienerIncrement(values, float(dt), self.trajectory_id, self.step_index)
        self.step_index += 1
        return increment

    def bridge(self, values, dt, step_index, depth):
        """Split one increment into ``2**depth`` Brownian-bridge pieces.

        The pieces sum to ``values`` and are independent ``N(0, dt / 2**depth)``
        increments conditionally on it.
        """
        pieces = np.asarray(values, dtype=float).reshape(1, -1)
        if depth == 0:
            return pieces
        rng = _generator(self.seed, self.trajectory_id, _BRIDGE_TAG, step_index, depth)
        duration = float(dt)
        for _ in range(depth):
            noise = rng.standard_normal(pieces.shape)
            first = 0.5 * pieces + np.sqrt(duration / 4.0) * noise
            pieces = np.stack([first, pieces - first], axis=1).reshape(-1, pieces.shape[1])
            duration /= 2.0
        return pieces


class WienerBlock:
    """Increments for a block of trajectories drawn from one or more streams.

    ``members[b]`` is the index of the stream driving block member ``b``;
    coupled members (several intensities, or two initial data on one path)
    point at the same stream.
    """

    def __init__(self, streams, members=None):
        self.streams = list(streams)
        self.members = np.arange(len(self.streams)) if members is None else np.asarray(members)

    @classmethod
    def independent(cls, seed, trajectory_ids, K, substeps=1):
        return cls([WienerStream(seed, i, K, substeps) for i in trajectory_ids])

    @classmethod
    def grouped(cls, seed, trajectory_ids, K, group, substeps=1):
        """``group`` consecutive members per trajectory, all on that trajectory's path."""
        streams = [WienerStream(seed, i, K, substeps) for i in trajectory_ids]
        return cls(streams, np.repeat(np.arange(len(streams)), group))

    @property
    def size(self):
        return len(self.members)

    def next(self, dt):
        """Increments of shape ``(size, K)`` for the next step."""
        draws = np.stack([stream.next(dt).values for stream in self.streams])
        return draws[self.members]

    def bridge(self, member, values, dt, step_index, depth):
        return self.streams[self.members[member]].bridge(values, dt, step_index, depth)


def draw_increments(seed, trajectory_ids, K, dt, steps):
    """Stacked increments, shape ``(len(trajectory_ids), steps, K)``."""
    out = np.zeros((len(trajectory_ids), steps, K))
    for row, trajectory_id in enumerate(trajectory_ids):
        stream = WienerStream(seed, trajectory_id, K)
        for step in range(steps):
            out[row, step] = stream.next(dt).values
    return out
