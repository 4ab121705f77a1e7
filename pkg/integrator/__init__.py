from .sim_config import SimConfig
from .linear_solver import ImplicitSolver, interior_laplacian
from .ensemble import EnsembleResult, resolve_threads, run_blocks
from .llb_integrator import LLBIntegrator, TrajectoryState
from .convergence import StrongConvergence, strong_convergence

__all__ = [
    "SimConfig",
    "ImplicitSolver",
    "interior_laplacian",
    "EnsembleResult",
    "resolve_threads",
    "run_blocks",
    "LLBIntegrator",
    "TrajectoryState",
    "StrongConvergence",
    "strong_convergence",
]
