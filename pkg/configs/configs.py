"""
Centralised default constants for the stochastic LLB laboratory.

Every default a config model, experiment or report writer falls back on is
defined here so that all modules import them from a single location.
"""

# ----------------------------------------------------------------------
# Paths and environment
# ----------------------------------------------------------------------

STUBS_DEFAULT_PATH = "stubs"
OUTPUT_DIR = "reports"
DETERMINISTIC_ENV = "LLB_DETERMINISTIC"

# ----------------------------------------------------------------------
# Simulation defaults
# ----------------------------------------------------------------------

DEFAULT_RADIUS = 4.0
DEFAULT_SPACING = 0.1
DEFAULT_DT = 1e-3
DEFAULT_HORIZON = 1.0
DEFAULT_SAMPLE_STRIDE = 10
DEFAULT_MODES = 16
DEFAULT_TAIL_LADDER = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0)
DEFAULT_LINF_CEILING = 1.0
DEFAULT_MAX_HALVINGS = 8
DEFAULT_BLOCK_SIZE = 8

# ----------------------------------------------------------------------
# Experiment defaults
# ----------------------------------------------------------------------

DEFAULT_ENSEMBLE_SIZE = 32
# small and large initial data, 10x apart
DEFAULT_AMPLITUDES = (0.1, 1.0)
DEFAULT_BURN_IN = 2.0
DEFAULT_AVERAGING_WINDOW = 10.0
DEFAULT_EPS_TARGET = 1e-2
DEFAULT_DISSIPATION_CEILING = 100.0
MIN_ENERGY_BALANCE_ENSEMBLE = 32
TIGHTNESS_QUANTILE = 0.95
ORACLE_RESOLUTION_LIMIT = 0.1
# trajectories whose cut-off paths are held in memory at once
EXPANSION_CHUNK = 64

# ----------------------------------------------------------------------
# Measures and reports
# ----------------------------------------------------------------------

BL_DICTIONARY_SIZE = 64
BL_DICTIONARY_SEED = 1729
CSV_SCHEMA_VERSION = 1
