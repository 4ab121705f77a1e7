"""
Simulation parameters.

``SimConfig`` is frozen and strict: unknown keys are rejected and every
cross-field constraint is checked by a model validator, so an instance that
exists is always runnable.
"""

from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from configs import (
    DEFAULT_BLOCK_SIZE,
    DEFAULT_DT,
    DEFAULT_HORIZON,
    DEFAULT_LINF_CEILING,
    DEFAULT_MAX_HALVINGS,
    DEFAULT_MODES,
    DEFAULT_RADIUS,
    DEFAULT_SAMPLE_STRIDE,
    DEFAULT_SPACING,
    DEFAULT_TAIL_LADDER,
)
from grid_cutoff import make_grid
from utils.errors import GridError

_STEP_TOLERANCE = 64.0 * np.finfo(float).eps


class SimConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    # grid
    dimension: Literal[1, 2] = 1
    radius: float = Field(DEFAULT_RADIUS, gt=0)
    spacing: float = Field(DEFAULT_SPACING, gt=0)

    # time
    dt: float = Field(DEFAULT_DT, gt=0)
    horizon: float = Field(DEFAULT_HORIZON, ge=0)
    scheme: Literal["semi-implicit", "explicit"] = "semi-implicit"
    safety: float = Field(1.0, ge=1)
    sample_stride: int = Field(DEFAULT_SAMPLE_STRIDE, ge=1)

    # noise
    preset: Literal["bump", "fourier"] = "bump"
    modes: int = Field(DEFAULT_MODES, ge=0)
    intensity: float = Field(1.0, ge=0, le=1)
    seed: int = Field(0, ge=0, lt=2**64)
    bump_radius: float = Field(1.0, gt=0)
    fine_substeps: int = Field(1, ge=1)

    # equation
    gamma: float = 1.0
    kappa: float = Field(1.0, ge=0)
    include_precession: bool = True
    include_cubic: bool = True
    include_multiplicative: bool = True

    # observables and monitor
    tail_ladder: tuple[float, ...] = DEFAULT_TAIL_LADDER
    linf_ceiling: float = Field(DEFAULT_LINF_CEILING, gt=0)
    max_halvings: int = Field(DEFAULT_MAX_HALVINGS, ge=1)
    block_size: int = Field(DEFAULT_BLOCK_SIZE, ge=1)

    @model_validator(mode="after")
    def check_consistency(self):
        try:
            make_grid(self.dimension, self.radius, self.spacing)
        except GridError as exc:
            raise ValueError(str(exc)) from exc

        if self.scheme == "explicit":
            limit = self.spacing**2 / (2.0 * self.dimension * self.safety)
            if self.dt > limit:
                raise ValueError(
                    f"explicit-scheme stability guard violated: dt={self.dt} > "
                    f"h^2/(2 d safety)={limit:.6g}"
                )

        steps = self.horizon / self.dt
        if abs(steps - round(steps)) > _STEP_TOLERANCE * max(1.0, steps):
            raise ValueError(f"dt={self.dt} does not divide horizon={self.horizon}")
        if round(steps) % self.sample_stride:
            raise ValueError(
                f"sample_stride={self.sample_stride} does not divide the {round(steps)} steps"
            )

        ladder = self.tail_ladder
        if not ladder:
            raise ValueError("tail_ladder must not be empty")
        if any(b <= a for a, b in zip(ladder, ladder[1:])):
            raise ValueError("tail_ladder must be strictly increasing")
        if ladder[0] < 0 or ladder[-1] >= self.radius:
            raise ValueError(f"tail_ladder entries must lie in [0, {self.radius})")
        return self

    # ------------------------------------------------------------------
    # Derived quantities
    # ------------------------------------------------------------------

    @property
    def steps(self):
        return int(round(self.horizon / self.dt))

    @property
    def samples(self):
        return self.steps // self.sample_stride + 1

    @property
    def experimental(self):
        """Two-dimensional runs carry no tail or energy guarantees."""
        return self.dimension == 2

    def make_grid(self):
        return make_grid(self.dimension, self.radius, self.spacing)

    def linear(self):
        """Copy with the precession, cubic and multiplicative terms switched off."""
        return self.model_copy(
            update={"include_precession": False, "include_cubic": False, "include_multiplicative": False}
        )

    def updated(self, **changes):
        """Validated copy with ``changes`` applied."""
        return SimConfig(**{**self.model_dump(), **changes})
