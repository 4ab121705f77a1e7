from .observables import (
    NORM_NAMES,
    BASE_NAMES,
    ObservableRecord,
    observable_names,
    tail_name,
    parse_tail_name,
)
from .energy_balance import EnergyBalance, energy_balance_residual
from .dissipation import (
    DissipationFit,
    GronwallCheck,
    dissipation_bound_check,
    l2_gronwall_check,
    integrated_dissipation_check,
    absorbing_time,
)
from .empirical_measure import EmpiricalMeasure, kb_measure, occupation_frequency
from .bl_distance import bl_distance, ramp_directions, ramp_discrepancy
from .tightness import TightnessProfile, tightness_profile, weighted_quantile, common_tight_radius
from .continuity import ContinuityReport, initial_data_continuity

__all__ = [
    "NORM_NAMES",
    "BASE_NAMES",
    "ObservableRecord",
    "observable_names",
    "tail_name",
    "parse_tail_name",
    "EnergyBalance",
    "energy_balance_residual",
    "DissipationFit",
    "GronwallCheck",
    "dissipation_bound_check",
    "l2_gronwall_check",
    "integrated_dissipation_check",
    "absorbing_time",
    "EmpiricalMeasure",
    "kb_measure",
    "occupation_frequency",
    "bl_distance",
    "ramp_directions",
    "ramp_discrepancy",
    "TightnessProfile",
    "tightness_profile",
    "weighted_quantile",
    "common_tight_radius",
    "ContinuityReport",
    "initial_data_continuity",
]
