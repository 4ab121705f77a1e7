"""
Exception hierarchy shared by every package of the laboratory.

Preconditions raise one of these; operations whose failure is an expected
outcome (bound checks, uniformity searches) return result objects instead.
"""


class LabError(Exception):
    """Base class of all laboratory errors."""


class GridError(LabError, ValueError):
    """Invalid grid parameters or non-nested grids."""


class GridMismatchError(GridError):
    """Operands live on different grids or coordinate frames."""


class ConfigError(LabError, ValueError):
    """Configuration failed to parse or validate.

    Parameters
    ----------
    errors : list[str]
        One message per offending field, formatted ``"<dotted.key>: <reason>"``.
    """

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors) if self.errors else "invalid configuration")


class NoiseError(LabError, ValueError):
    """Noise basis is unusable (non-finite norms, mode-count mismatch)."""


class BlowUpError(LabError, RuntimeError):
    """A trajectory produced non-finite values.

    Parameters
    ----------
    message : str
        Human readable diagnostic.
    last_finite_time : float
        Last sample time at which every failed trajectory was still finite.
    trajectory_ids : list[int]
        Identifiers of the failed trajectories.
    """

    def __init__(self, message, last_finite_time, trajectory_ids=()):
        self.last_finite_time = float(last_finite_time)
        self.trajectory_ids = list(trajectory_ids)
        super().__init__(message)


class ObservableError(LabError, ValueError):
    """Observable definitions do not match or are missing."""


class OracleError(LabError, ValueError):
    """Requested oracle mode is not resolved by the grid."""


class InsufficientEnsembleError(LabError, ValueError):
    """The ensemble is too small for the requested statistic."""
