"""
Time stepping of the Ito-form stochastic LLB equation on ``[-n, n]^d``.

The equation integrated is

    du = [Lap u + gamma u x Lap u - (1 + kappa |u|^2) u
          + 1/2 eps^2 sum_k (u x f_k) x f_k] dt
         + eps sum_k (u x f_k + f_k) dW_k

with ``u = 0`` on the cube boundary and initial data ``theta_n u_0``. The
semi-implicit scheme treats ``Lap u - u`` implicitly and everything else
explicitly; noise enters as an Euler-Maruyama increment.

All kernels work on blocks of shape ``(B, *grid.shape, 3)``; a block is a set
of trajectories advanced in lockstep.
"""

import logging
from dataclasses import dataclass, field
from functools import partial
from itertools import combinations

import numpy as np

from field_ops import NormReport, VectorField, norm_values, tail_values
from field_ops.operators import cross, laplacian_values
from grid_cutoff import CutoffProfile, apply_cutoff
from measure_lab.observables import NORM_NAMES, ObservableRecord, observable_names, tail_name
from noise_model import WienerBlock, WienerStream, build_basis, ito_correction_values
from utils.errors import GridMismatchError
from .ensemble import EnsembleResult, run_blocks
from .linear_solver import ImplicitSolver

logger = logging.getLogger(__name__)


@dataclass
class TrajectoryState:
    """State of a single trajectory advanced with :meth:`LLBIntegrator.step`.

    ``stream`` is consumed in place; ``records`` holds the observables sampled
    so far.
    """

    t: float
    u: VectorField
    stream: WienerStream
    step_index: int = 0
    records: list = field(default_factory=list)
    failed: bool = False
    last_finite_time: float = 0.0


def _per_member(intensities, values):
    """Reshape per-member intensities to broadcast against a block."""
    intensities = np.asarray(intensities, dtype=float)
    if intensities.ndim == 0:
        return intensities
    return intensities.reshape((-1,) + (1,) * (values.ndim - 1))


class LLBIntegrator:
    """Semi-implicit (or explicit) Euler-Maruyama integrator.

    Parameters
    ----------
    config : SimConfig
        Validated simulation parameters.
    basis : NoiseBasis, optional
        Noise modes on the config's grid; built from the config's preset when
        omitted.
    """

    def __init__(self, config, basis=None):
        self.config = config
        self.grid = config.make_grid()
        if basis is None:
            basis = build_basis(
                self.grid, config.modes, config.preset, config.intensity, config.bump_radius
            )
        elif not basis.grid.same_frame(self.grid):
            raise GridMismatchError(f"noise basis on {basis.grid!r}, integrator on {self.grid!r}")
        self.basis = basis
        self.cutoff = CutoffProfile(config.radius, dimension=config.dimension)
        self.names = observable_names(config.tail_ladder)
        self._unit_basis = basis.with_intensity(1.0)
        self._solver = None

    def __repr__(self):
        return f"LLBIntegrator({self.grid!r}, scheme={self.config.scheme!r}, {self.basis!r})"

    def with_horizon(self, horizon):
        """Same equation and noise basis, run to a different horizon."""
        return LLBIntegrator(self.config.updated(horizon=horizon), self.basis)

    # ------------------------------------------------------------------
    # Drift and noise
    # ------------------------------------------------------------------

    def _explicit_terms(self, values, lap, intensities):
        cfg = self.config
        out = np.zeros_like(values)
        if cfg.include_precession:
            out += cfg.gamma * cross(values, lap)
        if cfg.include_cubic:
            out -= cfg.kappa * np.sum(values**2, axis=-1, keepdims=True) * values
        if cfg.include_multiplicative and self.basis.count:
            eps = _per_member(intensities, values)
            out += eps**2 * ito_correction_values(values, self._unit_basis)
        return out

    def drift_values(self, values, intensities):
        lap = laplacian_values(values, self.grid)
        return lap - values + self._explicit_terms(values, lap, intensities)

    def drift(self, u):
        """Full Ito drift of one field at the basis intensity.

        Raises
        ------
        BlowUpError
            If the drift has non-finite components.
        """
        if not u.grid.same_frame(self.grid):
            raise GridMismatchError(f"field on {u.grid!r}, integrator on {self.grid!r}")
        with np.errstate(over="ignore", invalid="ignore"):
            values = self.drift_values(u.values, self.basis.intensity)
        return u.with_values(values).assert_finite("drift")

    def noise_values(self, values, increments, intensities):
        forcing = _per_member(intensities, values) * self._unit_basis.combine(increments)
        if self.config.include_multiplicative:
            return cross(values, forcing) + forcing
        return forcing

    # ------------------------------------------------------------------
    # One step
    # ------------------------------------------------------------------

    def _advance(self, values, increments, dt, intensities, solver):
        noise = self.noise_values(values, increments, intensities)
        if self.config.scheme == "semi-implicit":
            lap = laplacian_values(values, self.grid)
            rhs = values + dt * self._explicit_terms(values, lap, intensities) + noise
            return solver.solve(rhs, dt)
        new = values + dt * self.drift_values(values, intensities) + noise
        new[:, self.grid.boundary_mask] = 0.0
        return new

    def required_halvings(self, linf, dt):
        """Smallest ``k >= 1`` making the explicit terms stable at ``dt / 2**k``.

        Capped at ``max_halvings``.
        """
        cfg = self.config
        spectral = self.grid.laplacian_spectral_bound
        precession = (cfg.gamma * linf) ** 2 if cfg.include_precession else 0.0
        cubic = cfg.kappa * linf**2 if cfg.include_cubic else 0.0

        def stable(step):
            if step * cubic > 1.0:
                return False
            if cfg.scheme == "semi-implicit":
                return step * spectral * (precession - 1.0) <= 1.0
            return step * spectral * (1.0 + precession) <= 2.0

        k = 1
        while k < cfg.max_halvings and not stable(dt / 2**k):
            k += 1
        return k

    def _monitored_step(self, values, intensities, wiener, step_index, active, solver):
        cfg = self.config
        dt = cfg.dt
        increments = wiener.next(dt)
        new = values.copy()
        halvings = np.zeros(len(values), dtype=int)
        if not active.any():
            return new, halvings

        spatial = tuple(range(1, values.ndim - 1))
        linf = np.sqrt(np.max(np.sum(values**2, axis=-1), axis=spatial))
        for b in np.flatnonzero(active & (linf > cfg.linf_ceiling)):
            halvings[b] = self.required_halvings(linf[b], dt)

        plain = active & (halvings == 0)
        if plain.any():
            new[plain] = self._advance(values[plain], increments[plain], dt, intensities[plain], solver)

        for k in np.unique(halvings[halvings > 0]):
            members = np.flatnonzero(halvings == k)
            pieces = np.stack(
                [wiener.bridge(b, increments[b], dt, step_index, k) for b in members], axis=1
            )
            sub = values[members]
            for piece in pieces:
                sub = self._advance(sub, piece, dt / 2**k, intensities[members], solver)
            new[members] = sub
            logger.debug("step %d: %d members split into %d substeps", step_index, len(members), 2**k)
        return new, halvings

    # ------------------------------------------------------------------
    # Observables
    # ------------------------------------------------------------------

    def observe(self, values):
        """Observable values of a block, ``name -> (B,)``."""
        ladder = self.config.tail_ladder
        out = dict(norm_values(values, self.grid))
        for order in ("L2", "H1"):
            tails = tail_values(values, self.grid, ladder, order)
            for i, m in enumerate(ladder):
                out[tail_name(order, m)] = tails[..., i]
        return {name: np.asarray(out[name], dtype=float) for name in self.names}

    def _record(self, values, t):
        observed = self.observe(values[None])
        norms = {name: float(observed[name][0]) for name in NORM_NAMES}
        tails = {name: float(v[0]) for name, v in observed.items() if name.startswith("tail_")}
        return ObservableRecord(t, NormReport(**norms), tails, self.basis.forcing_energy)

    # ------------------------------------------------------------------
    # Single trajectory API
    # ------------------------------------------------------------------

    def initial_state(self, u0):
        """``theta_n u0`` on the integrator grid.

        ``u0`` may live on this grid or on a larger grid it is nested in.
        """
        if not u0.grid.same_frame(self.grid):
            u0 = u0.restrict(self.grid)
        return apply_cutoff(u0, self.cutoff).assert_finite("initial data")

    def start(self, u0, trajectory_id=0):
        u = self.initial_state(u0)
        stream = WienerStream(self.config.seed, trajectory_id, self.basis.count, self.config.fine_substeps)
        return TrajectoryState(0.0, u, stream, records=[self._record(u.values, 0.0)])

    def step(self, state):
        """Advance one step; the returned state shares ``state.stream``.

        A step producing non-finite values returns a failed state whose field
        is the last finite one.
        """
        if state.failed:
            return state
        if state.step_index >= self.config.steps:
            raise ValueError(f"state is already at the horizon T={self.config.horizon}")
        if self._solver is None and self.config.scheme == "semi-implicit":
            self._solver = ImplicitSolver(self.grid)

        wiener = WienerBlock([state.stream])
        values = np.asarray(state.u.values)[None]
        intensities = np.array([self.basis.intensity])
        with np.errstate(over="ignore", invalid="ignore"):
            new, _ = self._monitored_step(
                values, intensities, wiener, state.step_index, np.array([True]), self._solver
            )

        index = state.step_index + 1
        t = index * self.config.dt
        records = list(state.records)
        if not np.all(np.isfinite(new)):
            logger.warning("trajectory %d failed after t=%g", state.stream.trajectory_id, state.t)
            return TrajectoryState(state.t, state.u, state.stream, index, records, True, state.t)
        u = VectorField(self.grid, new[0])
        if index % self.config.sample_stride == 0:
            records.append(self._record(u.values, t))
        return TrajectoryState(t, u, state.stream, index, records, False, t)

    # ------------------------------------------------------------------
    # Blocks
    # ------------------------------------------------------------------

    def run_block(
        self,
        initial,
        intensities,
        wiener,
        trajectory_ids,
        group_size=1,
        pairs=(),
        probe=None,
        keep_final=False,
    ):
        """Advance a block of trajectories to the horizon.

        Parameters
        ----------
        initial : numpy.ndarray
            Initial values, shape ``(B, *grid.shape, 3)``.
        intensities : numpy.ndarray
            Noise intensity per member.
        wiener : WienerBlock
            Increment source with ``B`` members.
        trajectory_ids : numpy.ndarray
            Stream id per member (reported only).
        group_size : int
            Consecutive members that form one coupled group.
        pairs : sequence of tuple[int, int]
            Pairs of group members whose differences are sampled.
        probe : callable, optional
            ``probe(values) -> (B, P)`` evaluated at every sample.
        keep_final : bool
            Keep the final values in the result.
        """
        cfg = self.config
        solver = ImplicitSolver(self.grid) if cfg.scheme == "semi-implicit" else None
        block = len(initial)
        samples = cfg.samples
        groups = block // group_size
        pairs = list(pairs)

        observables = {name: np.full((block, samples), np.nan) for name in self.names}
        differences = {norm: np.full((groups, len(pairs), samples), np.nan) for norm in ("l2", "h1")}
        probes = {}
        values = np.array(initial, dtype=float)
        intensities = np.asarray(intensities, dtype=float)
        failed = np.zeros(block, dtype=bool)
        last_finite = np.zeros(block)
        activations = np.zeros(block, dtype=int)

        def sample(s):
            alive = ~failed
            for name, column in self.observe(values).items():
                observables[name][alive, s] = column[alive]
            if probe is not None:
                features = np.asarray(probe(values), dtype=float)
                if "probe" not in probes:
                    probes["probe"] = np.full((block, samples, features.shape[1]), np.nan)
                probes["probe"][alive, s] = features[alive]
            if pairs:
                grouped = values.reshape((groups, group_size) + values.shape[1:])
                both = ~failed.reshape(groups, group_size)
                for p, (i, j) in enumerate(pairs):
                    gap = norm_values(grouped[:, i] - grouped[:, j], self.grid)
                    ok = both[:, i] & both[:, j]
                    differences["l2"][ok, p, s] = gap["l2"][ok]
                    differences["h1"][ok, p, s] = gap["h1"][ok]

        sample(0)
        with np.errstate(over="ignore", invalid="ignore"):
            for step in range(cfg.steps):
                new, halvings = self._monitored_step(values, intensities, wiener, step, ~failed, solver)
                activations += halvings > 0
                broken = ~failed & ~np.all(np.isfinite(new.reshape(block, -1)), axis=1)
                if broken.any():
                    logger.warning(
                        "trajectories %s failed after t=%g",
                        sorted(set(int(i) for i in trajectory_ids[broken])),
                        step * cfg.dt,
                    )
                    new[broken] = values[broken]
                    failed |= broken
                values = new
                last_finite[~failed] = (step + 1) * cfg.dt
                if (step + 1) % cfg.sample_stride == 0:
                    sample((step + 1) // cfg.sample_stride)

        return EnsembleResult(
            times=np.arange(samples) * cfg.sample_stride * cfg.dt,
            observables=observables,
            failed=failed,
            last_finite_time=last_finite,
            trajectory_ids=np.asarray(trajectory_ids),
            intensities=intensities,
            forcing_energy_unit=self._unit_basis.forcing_energy,
            cubic_coefficient=cfg.kappa if cfg.include_cubic else 0.0,
            dt=cfg.dt,
            spacing=cfg.spacing,
            group_size=group_size,
            experimental=cfg.experimental,
            monitor_activations=activations,
            probes=probes,
            pairs=pairs,
            pair_differences=differences if pairs else {},
            final_values=values if keep_final else None,
        )

    # ------------------------------------------------------------------
    # Ensembles
    # ------------------------------------------------------------------

    def _independent_block(self, start, ids, probe, keep_final):
        count = len(ids)
        wiener = WienerBlock.independent(self.config.seed, ids, self.basis.count, self.config.fine_substeps)
        initial = np.broadcast_to(start, (count,) + start.shape).copy()
        intensities = np.full(count, self.basis.intensity)
        return self.run_block(initial, intensities, wiener, ids, probe=probe, keep_final=keep_final)

    def simulate_ensemble(self, u0, trajectories, threads=None, probe=None, keep_final=False, first_id=0):
        """Independent trajectories ``first_id .. first_id + M - 1`` from ``u0``."""
        if trajectories < 1:
            raise ValueError(f"ensemble needs at least one trajectory, got {trajectories}")
        start = self.initial_state(u0).values
        ids = np.arange(first_id, first_id + trajectories)
        size = self.config.block_size
        tasks = [
            partial(self._independent_block, start, ids[i : i + size], probe, keep_final)
            for i in range(0, trajectories, size)
        ]
        logger.debug("running %d trajectories in %d blocks", trajectories, len(tasks))
        return EnsembleResult.concatenate(run_blocks(tasks, threads))

    def simulate(self, u0, probe=None, keep_final=False):
        """One trajectory (id 0) from ``theta_n u0``."""
        return self.simulate_ensemble(u0, 1, threads=1, probe=probe, keep_final=keep_final)

    def _group_block(self, starts, intensities, ids, pairs, probe, keep_final):
        group = len(starts)
        wiener = WienerBlock.grouped(self.config.seed, ids, self.basis.count, group, self.config.fine_substeps)
        initial = np.concatenate([starts] * len(ids), axis=0)
        return self.run_block(
            initial,
            np.tile(intensities, len(ids)),
            wiener,
            np.repeat(ids, group),
            group_size=group,
            pairs=pairs,
            probe=probe,
            keep_final=keep_final,
        )

    def simulate_group(self, initial_fields, intensities, trajectories=1, threads=None, probe=None, keep_final=False):
        """Coupled groups: every group shares one Wiener path across its members.

        Member ``g * G + i`` of the result is trajectory ``g`` started from
        ``initial_fields[i]`` at intensity ``intensities[i]``; all pairwise
        differences within a group are sampled.
        """
        if len(initial_fields) != len(intensities):
            raise ValueError("one intensity per initial field is required")
        for eps in intensities:
            if not 0.0 <= eps <= 1.0:
                raise ValueError(f"noise intensity must lie in [0, 1], got {eps}")
        group = len(initial_fields)
        starts = np.stack([self.initial_state(u).values for u in initial_fields])
        intensities = np.asarray(intensities, dtype=float)
        pairs = list(combinations(range(group), 2))
        ids = np.arange(trajectories)
        per_block = max(1, self.config.block_size // group)
        tasks = [
            partial(self._group_block, starts, intensities, ids[i : i + per_block], pairs, probe, keep_final)
            for i in range(0, trajectories, per_block)
        ]
        return EnsembleResult.concatenate(run_blocks(tasks, threads))

    def simulate_coupled(self, u0, eps_list, trajectories=1, threads=None):
        """Advance one copy of ``u0`` per intensity on a shared Wiener path."""
        return self.simulate_group([u0] * len(eps_list), list(eps_list), trajectories, threads)

