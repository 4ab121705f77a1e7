from .vector_field import VectorField
from .operators import (
    cross,
    triple,
    laplacian,
    gradient,
    laplacian_values,
    gradient_values,
)
from .norms import NormReport, norms, norm_values, tail_mass, tail_ladder, tail_values
from .identities import (
    ConvergenceStudy,
    dirichlet_sine,
    random_dirichlet_field,
    cross_orthogonality_residual,
    cross_orthogonality_campaign,
    laplacian_convergence,
    integration_by_parts_residual,
    gagliardo_nirenberg_ratio,
    l4_interpolation_ratio,
    embedding_constants,
)
from .initial_data import INITIAL_PROFILES, make_initial_field

__all__ = [
    "VectorField",
    "cross",
    "triple",
    "laplacian",
    "gradient",
    "laplacian_values",
    "gradient_values",
    "NormReport",
    "norms",
    "norm_values",
    "tail_mass",
    "tail_ladder",
    "tail_values",
    "ConvergenceStudy",
    "dirichlet_sine",
    "random_dirichlet_field",
    "cross_orthogonality_residual",
    "cross_orthogonality_campaign",
    "laplacian_convergence",
    "integration_by_parts_residual",
    "gagliardo_nirenberg_ratio",
    "l4_interpolation_ratio",
    "embedding_constants",
    "INITIAL_PROFILES",
    "make_initial_field",
]
