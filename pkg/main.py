"""
Stochastic LLB laboratory: command-line entry point.

Usage::

    python main.py simulate --config runs/simulate.toml --out reports/
    python main.py oracle-check --seed 7 --format json --threads 0
    python main.py identity-suite --stub_path stubs/

Each sub-command runs one experiment kind: it loads the configuration
document (defaults when ``--config`` is omitted), applies the command-line
overrides, runs the experiment and writes its report. Exit status is 0 on
success, 2 for an invalid configuration (nothing is written) and 3 when
trajectories blew up (a partial report is written and flagged).
"""

import argparse
import logging
import sys

from configs import STUBS_DEFAULT_PATH
from configs.experiment_config import EXPERIMENT_KINDS, REPORT_FORMATS, ExperimentConfig, load_config
from experiments import ExperimentRunner
from utils import write_report
from utils.errors import ConfigError

logger = logging.getLogger("llb")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOW_UP = 3


# ======================================================================
# CLI
# ======================================================================

def parse_args(argv=None):
    parser = argparse.ArgumentParser(description="Stochastic LLB laboratory")
    parser.add_argument("kind", choices=EXPERIMENT_KINDS, help="experiment to run")
    parser.add_argument("--config", type=str, default=None, help="configuration document")
    parser.add_argument("--seed", type=int, default=None, help="master seed (overrides sim.seed)")
    parser.add_argument("--out", type=str, default=None, help="report directory")
    parser.add_argument("--format", choices=REPORT_FORMATS, default=None, help="report format")
    parser.add_argument("--threads", type=int, default=0, help="worker threads, 0 = all cores")
    parser.add_argument(
        "--stub_path",
        type=str,
        default=None,
        help=f"ensemble cache directory (e.g. {STUBS_DEFAULT_PATH}/)",
    )
    parser.add_argument(
        "--log-level",
        dest="log_level",
        default="INFO",
        choices=("DEBUG", "INFO", "WARNING", "ERROR"),
    )
    return parser.parse_args(argv)


def load_experiment(args):
    """Configuration for ``args``; the sub-command fixes the experiment kind."""
    config = load_config(args.config) if args.config else ExperimentConfig()
    return config.with_overrides(kind=args.kind, seed=args.seed, out=args.out, format=args.format)


# ======================================================================
# Pipeline
# ======================================================================

def main(argv=None):
    args = parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format="%(message)s")

    # ------------------------------------------------------------------
    # 1. Configuration
    # ------------------------------------------------------------------
    try:
        config = load_experiment(args)
    except ConfigError as exc:
        for error in exc.errors:
            logger.error("config error: %s", error)
        return EXIT_CONFIG

    # ------------------------------------------------------------------
    # 2. Experiment
    # ------------------------------------------------------------------
    runner = ExperimentRunner(config, threads=args.threads, stub_path=args.stub_path)
    report = runner.run()

    # ------------------------------------------------------------------
    # 3. Report
    # ------------------------------------------------------------------
    paths = write_report(report, config.out, config.format)
    for path in paths:
        logger.info("wrote %s", path)

    if report.partial:
        logger.error("%s finished with failed trajectories; report flagged partial", report.kind)
        return EXIT_BLOW_UP
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
