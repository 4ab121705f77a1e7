"""
Experiment orchestration: one pipeline per experiment kind, each turning an
:class:`ExperimentConfig` into an :class:`ExperimentReport` of pandas tables
and a JSON-ready summary.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from configs import MIN_ENERGY_BALANCE_ENSEMBLE, OUTPUT_DIR
from configs.experiment_config import serialize_config
from expansion_harness import DomainExpansionHarness, tail_uniformity
from field_ops import (
    cross_orthogonality_campaign,
    embedding_constants,
    integration_by_parts_residual,
    laplacian_convergence,
    make_initial_field,
    random_dirichlet_field,
)
from grid_cutoff import make_grid
from integrator import LLBIntegrator
from measure_lab import (
    BASE_NAMES,
    absorbing_time,
    bl_distance,
    common_tight_radius,
    dissipation_bound_check,
    energy_balance_residual,
    initial_data_continuity,
    integrated_dissipation_check,
    kb_measure,
    l2_gronwall_check,
    occupation_frequency,
    tail_name,
    tightness_profile,
)
from noise_model import quadratic_variation_campaign
from oracle import LinearOracle, oracle_compare
from utils import cached, config_digest, stub_file
from utils.errors import BlowUpError, InsufficientEnsembleError

logger = logging.getLogger(__name__)

CROSS_TOLERANCE = 1e-12
QUADRATIC_VARIATION_TOLERANCE = 1e-10
LAPLACIAN_ORDER = 2.0
LAPLACIAN_ORDER_TOLERANCE = 0.2
DISSIPATION_STEPS = 20
MONOTONE_SLACK = 1e-14


@dataclass
class ExperimentReport:
    """Tables, summary and flags of one experiment run.

    ``flags["partial"]`` is set when trajectories blew up; the tables then
    hold whatever was computed before and around the failure.
    """

    kind: str
    tables: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)

    @property
    def partial(self):
        return bool(self.flags.get("partial", False))

    def to_dict(self):
        return {"kind": self.kind, "flags": self.flags, "summary": self.summary, "tables": self.tables}


class ExperimentRunner:
    """Run the experiment an :class:`ExperimentConfig` describes.

    Parameters
    ----------
    config : ExperimentConfig
        Validated configuration.
    threads : int | None
        Worker threads per ensemble (``0``/``None`` for all cores).
    stub_path : str | None
        Directory of cached ensembles; ``None`` disables caching.
    """

    def __init__(self, config, threads=None, stub_path=None):
        self.config = config
        self.sim = config.sim
        self.threads = threads
        self.stub_path = stub_path
        self.partial = False
        self._document = serialize_config(config.with_overrides(out=OUTPUT_DIR, format="csv"))
        self._pipelines = {
            "simulate": self.run_simulate,
            "expand": self.run_expand,
            "measure": self.run_measure,
            "eps-sweep": self.run_eps_sweep,
            "oracle-check": self.run_oracle_check,
            "identity-suite": self.run_identity_suite,
        }

    # ------------------------------------------------------------------
    # Helpers
    # ------------------------------------------------------------------

    def _stub(self, label):
        return stub_file(self.stub_path, self.config.kind, label, config_digest(self._document, label))

    def _note_failures(self, failed, context):
        failed = int(failed)
        if failed:
            self.partial = True
            logger.warning("%s: %d trajectories failed", context, failed)
        return failed

    def initial_field(self, grid, amplitude=None):
        cfg = self.config
        amplitude = cfg.initial_amplitude if amplitude is None else amplitude
        return make_initial_field(grid, cfg.initial_profile, amplitude, cfg.initial_width)

    def _ensemble(self, label, integrator, u0):
        def compute():
            return integrator.simulate_ensemble(u0, self.config.trajectories, threads=self.threads)

        result = cached(self._stub(label), compute)
        self._note_failures(result.failed.sum(), label)
        return result

    def _measure(self, label, integrator, u0):
        cfg = self.config

        def compute():
            return kb_measure(
                integrator, u0, cfg.burn_in, cfg.averaging_window, cfg.trajectories, threads=self.threads
            )

        measure = cached(self._stub(label), compute)
        self._note_failures(measure.metadata.get("failed", 0), label)
        return measure

    def _measure_config(self):
        ladder = tuple(m for m in self.config.m_ladder if m < self.sim.radius) or (0.0,)
        return self.sim.updated(tail_ladder=ladder)

    # ------------------------------------------------------------------
    # Entry point
    # ------------------------------------------------------------------

    def run(self):
        kind = self.config.kind
        logger.info("running %s (seed %d, %d trajectories)", kind, self.sim.seed, self.config.trajectories)
        if self.sim.experimental:
            logger.warning("two-dimensional run: results are experimental")

        tables, summary = {}, {}
        try:
            self._pipelines[kind](tables, summary)
        except BlowUpError as exc:
            self.partial = True
            summary["blow_up"] = {
                "message": str(exc),
                "last_finite_time": exc.last_finite_time,
                "trajectories": exc.trajectory_ids,
            }
            logger.error("%s aborted: %s", kind, exc)

        flags = {"experimental": self.sim.experimental, "partial": self.partial}
        return ExperimentReport(kind, tables, summary, flags)

    # ------------------------------------------------------------------
    # simulate: ensemble statistics, energy balance, dissipation, continuity
    # ------------------------------------------------------------------

    def run_simulate(self, tables, summary):
        cfg = self.config
        integrator = LLBIntegrator(self.sim)
        ensembles = []
        for amplitude in cfg.amplitudes:
            u0 = self.initial_field(integrator.grid, amplitude)
            ensembles.append(self._ensemble(f"simulate-a{amplitude:g}", integrator, u0))
        first = ensembles[0]

        tables["observables"] = first.to_frame()
        tables["means"] = pd.DataFrame({"time": first.times, **{name: first.mean(name) for name in first.names}})
        summary["failed"] = int(first.failed.sum())
        summary["monitor_activations"] = int(np.sum(first.monitor_activations))

        try:
            balance = energy_balance_residual(first)
            tables["energy_balance"] = balance.to_frame()
            summary["energy_balance"] = {"fraction_within": balance.fraction_within, "passed": balance.passed}
        except InsufficientEnsembleError as exc:
            summary["energy_balance"] = {"skipped": str(exc), "minimum": MIN_ENERGY_BALANCE_ENSEMBLE}

        fit = dissipation_bound_check(ensembles, cfg.dissipation_ceiling)
        integrated = integrated_dissipation_check(ensembles, cfg.dissipation_ceiling)
        gronwall = l2_gronwall_check(first)
        summary["dissipation"] = {
            "constant": fit.constant,
            "per_amplitude": dict(zip((f"{a:g}" for a in cfg.amplitudes), fit.per_amplitude)),
            "spread": fit.spread,
            "passed": fit.passed,
            "integrated_constant": integrated.constant,
            "integrated_passed": integrated.passed,
            "l2_gronwall_passed": gronwall.passed,
            "absorbing_time": absorbing_time(first, 2.0 * fit.constant),
        }

        rows = []
        base = self.initial_field(integrator.grid)
        direction = make_initial_field(integrator.grid, "bump", 1.0, cfg.initial_width, direction=(0.0, 1.0, 0.0))
        for delta in cfg.perturbations:
            report = initial_data_continuity(
                integrator, base, base + direction * delta, cfg.trajectories, threads=self.threads
            )
            rows.append({"perturbation": delta, "median_ratio": report.median, "max_ratio": report.maximum})
        if rows:
            continuity = pd.DataFrame(rows)
            tables["continuity"] = continuity
            medians = continuity["median_ratio"].to_numpy()
            summary["continuity"] = {
                "median_ratio": float(np.median(medians)),
                "spread": float(np.max(medians) / np.min(medians)) if np.min(medians) > 0 else float("inf"),
            }

    # ------------------------------------------------------------------
    # expand: domain expansion and n-uniform tails
    # ------------------------------------------------------------------

    def run_expand(self, tables, summary):
        cfg = self.config
        largest = make_grid(self.sim.dimension, cfg.radii[-1], self.sim.spacing)
        u0 = self.initial_field(largest)
        ladder = tuple(m for m in cfg.m_ladder if m < cfg.radii[-1])
        harness = DomainExpansionHarness(self.sim, threads=self.threads)

        def compute():
            return harness.run_expansion(cfg.radii, u0, cfg.trajectories, ladder=ladder)

        report = cached(self._stub("expansion"), compute)
        self._note_failures(report.failed, "expansion")
        tables["expansion"] = report.to_frame()

        medians = report.median_differences
        summary["median_differences"] = list(medians)
        summary["strictly_decreasing"] = all(b < a for a, b in zip(medians, medians[1:]))
        summary["failed"] = report.failed
        summary["embedding_defect"] = report.embedding_defect
        if len(report.radii) > 1:
            summary["tail_uniformity"] = tail_uniformity(report, cfg.eps_target).to_dict()

    # ------------------------------------------------------------------
    # measure: occupation measures and their tightness across eps
    # ------------------------------------------------------------------

    def run_measure(self, tables, summary):
        cfg = self.config
        base = self._measure_config()
        measures = {}
        profiles = []
        tightness_rows = []
        expectation_rows = []
        for eps in cfg.eps_list:
            integrator = LLBIntegrator(base.updated(intensity=eps))
            u0 = self.initial_field(integrator.grid)
            measure = self._measure(f"measure-eps{eps:g}", integrator, u0)
            profile = tightness_profile(measure, cfg.m_ladder)
            measures[eps] = measure
            profiles.append(profile)
            for m, q in zip(profile.ladder, profile.quantiles):
                tightness_rows.append({"eps": eps, "m": m, "quantile": q})
            expectation_rows.append({"eps": eps, **{name: measure.expectation(name) for name in BASE_NAMES}})

        tables["tightness"] = pd.DataFrame(tightness_rows)
        tables["expectations"] = pd.DataFrame(expectation_rows)
        m_star = common_tight_radius(profiles, cfg.eps_target)
        summary["common_tight_radius"] = m_star
        summary["uniformly_tight"] = m_star is not None
        if m_star is not None and m_star < base.radius:
            name = tail_name("H1", m_star)
            summary["occupation"] = {
                f"{eps:g}": occupation_frequency(measure, name, cfg.eps_target)
                for eps, measure in measures.items()
            }

    # ------------------------------------------------------------------
    # eps-sweep: pathwise and distributional continuity in eps
    # ------------------------------------------------------------------

    def run_eps_sweep(self, tables, summary):
        cfg = self.config
        base = self._measure_config()
        integrator = LLBIntegrator(base.updated(intensity=cfg.eps_base))
        u0 = self.initial_field(integrator.grid)
        intensities = [cfg.eps_base] + [cfg.eps_base + delta for delta in cfg.delta_list]

        coupled = integrator.simulate_group(
            [u0] * len(intensities), intensities, cfg.trajectories, threads=self.threads
        )
        self._note_failures(coupled.failed.sum(), "coupled sweep")
        sup = coupled.sup_pair_differences("h1")

        reference = self._measure(f"sweep-eps{cfg.eps_base:g}", integrator, u0)
        rows = []
        for i, delta in enumerate(cfg.delta_list):
            shifted = LLBIntegrator(base.updated(intensity=cfg.eps_base + delta))
            measure = self._measure(f"sweep-eps{cfg.eps_base + delta:g}", shifted, u0)
            rows.append(
                {
                    "delta": delta,
                    "median_sup_h1": float(np.nanmedian(sup[:, i])),
                    "bl_distance": bl_distance(reference.select(BASE_NAMES), measure.select(BASE_NAMES)),
                }
            )
        sweep = pd.DataFrame(rows)
        tables["eps_sweep"] = sweep

        medians = sweep["median_sup_h1"].to_numpy()
        if len(rows) > 1 and np.all(medians > 0):
            summary["slope"] = float(np.polyfit(np.log(sweep["delta"]), np.log(medians), 1)[0])
        distances = sweep["bl_distance"].to_numpy()
        summary["bl_non_increasing"] = bool(np.all(np.diff(distances) <= MONOTONE_SLACK))

    # ------------------------------------------------------------------
    # oracle-check: linear equation against the OU closed form
    # ------------------------------------------------------------------

    def run_oracle_check(self, tables, summary):
        cfg = self.config

        def compute():
            return oracle_compare(
                self.sim,
                modes=cfg.oracle_modes,
                t_avg=cfg.averaging_window,
                t_burn=cfg.burn_in,
                trajectories=cfg.trajectories,
                threads=self.threads,
            )

        comparisons = cached(self._stub("oracle"), compute)
        tables["modes"] = pd.DataFrame([c.to_dict() for c in comparisons])

        integrator = LLBIntegrator(self.sim.linear())
        oracle = LinearOracle(integrator.grid, integrator.basis)
        summary["max_relative_error"] = max(c.relative_error for c in comparisons)
        summary["means_centered"] = all(c.mean <= 3.0 * c.mean_error + 1e-15 for c in comparisons)
        summary["orthogonality_defect"] = oracle.orthogonality_defect(max(cfg.oracle_modes))

    # ------------------------------------------------------------------
    # identity-suite: algebraic and discrete-calculus residuals
    # ------------------------------------------------------------------

    def _noise_free_dissipation(self, grid, rng):
        """Largest one-step increase of ``||u||^2`` at zero noise."""
        config = self.sim.updated(intensity=0.0, horizon=DISSIPATION_STEPS * self.sim.dt, sample_stride=1)
        integrator = LLBIntegrator(config)
        worst = -np.inf
        for _ in range(self.config.identity_pairs):
            u0 = random_dirichlet_field(grid, rng)
            energy = integrator.simulate(u0).observables["l2"][0]
            worst = max(worst, float(np.max(np.diff(energy))))
        return worst

    def run_identity_suite(self, tables, summary):
        cfg = self.config
        seed = self.sim.seed
        grid = self.sim.make_grid()
        rng = np.random.default_rng(seed)

        cross = cross_orthogonality_campaign(cfg.identity_samples, seed)
        quadratic = quadratic_variation_campaign(cfg.identity_pairs, seed, grid=grid)
        study = laplacian_convergence()
        by_parts = max(
            integration_by_parts_residual(random_dirichlet_field(grid, rng), random_dirichlet_field(grid, rng))
            for _ in range(cfg.identity_pairs)
        )
        constants = embedding_constants(grid, cfg.identity_pairs, seed)
        increase = self._noise_free_dissipation(grid, rng)

        rows = [
            {"statistic": "cross_orthogonality", "value": cross},
            {"statistic": "quadratic_variation", "value": quadratic},
            {"statistic": "integration_by_parts", "value": by_parts},
            {"statistic": "noise_free_energy_increase", "value": increase},
        ]
        rows += [{"statistic": f"laplacian_error@{h:g}", "value": e} for h, e in zip(study.spacings, study.errors)]
        rows += [{"statistic": name, "value": value} for name, value in sorted(constants.items())]
        tables["identities"] = pd.DataFrame(rows, columns=["statistic", "value"])

        summary["laplacian_slope"] = study.slope
        summary["passed"] = {
            "cross_orthogonality": cross <= CROSS_TOLERANCE,
            "quadratic_variation": quadratic <= QUADRATIC_VARIATION_TOLERANCE,
            "laplacian_order": abs(study.slope - LAPLACIAN_ORDER) <= LAPLACIAN_ORDER_TOLERANCE,
            "noise_free_dissipation": increase < 0.0,
        }
