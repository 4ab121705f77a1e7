from .noise_basis import NOISE_PRESETS, NoiseBasis, build_basis
from .wiener import WienerIncrement, WienerStream, WienerBlock, draw_increments
from .stochastic_terms import (
    ito_correction,
    ito_correction_values,
    diffusion,
    diffusion_values,
    quadratic_variation_check,
    quadratic_variation_scale,
    quadratic_variation_campaign,
)

__all__ = [
    "NOISE_PRESETS",
    "NoiseBasis",
    "build_basis",
    "WienerIncrement",
    "WienerStream",
    "WienerBlock",
    "draw_increments",
    "ito_correction",
    "ito_correction_values",
    "diffusion",
    "diffusion_values",
    "quadratic_variation_check",
    "quadratic_variation_scale",
    "quadratic_variation_campaign",
]
