from .grid import Grid, make_grid
from .cutoff_profile import CutoffProfile, theta, apply_cutoff

__all__ = ["Grid", "make_grid", "CutoffProfile", "theta", "apply_cutoff"]
