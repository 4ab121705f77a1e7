"""
Experiment configuration and its flat dotted-key document format.

A document is a list of ``key = value`` lines; nested simulation parameters
use dotted keys (``sim.dt = 0.001``). The format is a TOML subset and is read
with ``tomllib``. Unknown keys are rejected at every level.
"""

import json
import math
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from configs import (
    DEFAULT_AMPLITUDES,
    DEFAULT_AVERAGING_WINDOW,
    DEFAULT_BURN_IN,
    DEFAULT_DISSIPATION_CEILING,
    DEFAULT_ENSEMBLE_SIZE,
    DEFAULT_EPS_TARGET,
    DEFAULT_TAIL_LADDER,
    OUTPUT_DIR,
)
from integrator.sim_config import SimConfig
from utils.errors import ConfigError

EXPERIMENT_KINDS = ("simulate", "expand", "measure", "eps-sweep", "oracle-check", "identity-suite")
REPORT_FORMATS = ("csv", "json")


def _non_decreasing(values):
    return all(b >= a for a, b in zip(values, values[1:]))


def _strictly_decreasing(values):
    return all(b < a for a, b in zip(values, values[1:]))


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: Literal["simulate", "expand", "measure", "eps-sweep", "oracle-check", "identity-suite"] = "simulate"
    sim: SimConfig = Field(default_factory=SimConfig)

    # initial data
    initial_profile: Literal["bump", "gaussian", "sine", "zero"] = "bump"
    initial_amplitude: float = Field(1.0, ge=0)
    initial_width: float = Field(1.0, gt=0)

    # ensembles
    trajectories: int = Field(DEFAULT_ENSEMBLE_SIZE, ge=1)
    amplitudes: tuple[float, ...] = DEFAULT_AMPLITUDES
    perturbations: tuple[float, ...] = (1e-2, 1e-3)
    dissipation_ceiling: float = Field(DEFAULT_DISSIPATION_CEILING, gt=0)

    # expansion
    radii: tuple[float, ...] = (4.0, 8.0, 16.0)
    eps_target: float = Field(DEFAULT_EPS_TARGET, gt=0)

    # measures
    eps_list: tuple[float, ...] = (0.0, 0.5, 1.0)
    eps_base: float = Field(0.5, ge=0, le=1)
    delta_list: tuple[float, ...] = (0.1, 0.05, 0.025)
    m_ladder: tuple[float, ...] = DEFAULT_TAIL_LADDER
    burn_in: float = Field(DEFAULT_BURN_IN, ge=0)
    averaging_window: float = Field(DEFAULT_AVERAGING_WINDOW, ge=0)

    # oracle and identities
    oracle_modes: tuple[int, ...] = (1, 2, 3)
    identity_samples: int = Field(10_000, ge=1)
    identity_pairs: int = Field(100, ge=1)

    # output
    out: str = OUTPUT_DIR
    format: Literal["csv", "json"] = "csv"

    @model_validator(mode="after")
    def check_ladders(self):
        if not self.radii or not _non_decreasing(self.radii) or self.radii[0] <= 0:
            raise ValueError("radii must be a non-empty, non-decreasing list of positive radii")
        if not self.eps_list or not _non_decreasing(self.eps_list):
            raise ValueError("eps_list must be non-empty and sorted")
        if any(not 0.0 <= eps <= 1.0 for eps in self.eps_list):
            raise ValueError("eps_list entries must lie in [0, 1]")
        if not self.delta_list or not _strictly_decreasing(self.delta_list) or self.delta_list[-1] <= 0:
            raise ValueError("delta_list must be a non-empty, strictly decreasing list of positive steps")
        if self.eps_base + self.delta_list[0] > 1.0:
            raise ValueError(f"eps_base + delta = {self.eps_base + self.delta_list[0]} leaves [0, 1]")
        if not self.m_ladder or any(b <= a for a, b in zip(self.m_ladder, self.m_ladder[1:])):
            raise ValueError("m_ladder must be non-empty and strictly increasing")
        if self.m_ladder[0] < 0:
            raise ValueError("m_ladder entries must be non-negative")
        if len(self.amplitudes) < 2 or any(b <= a for a, b in zip(self.amplitudes, self.amplitudes[1:])):
            raise ValueError("amplitudes must list at least two strictly increasing values")
        if self.amplitudes[0] < 0:
            raise ValueError("amplitudes must be non-negative")
        if not _strictly_decreasing(self.perturbations) or any(p <= 0 for p in self.perturbations):
            raise ValueError("perturbations must be positive and strictly decreasing")
        if not self.oracle_modes or any(b <= a for a, b in zip(self.oracle_modes, self.oracle_modes[1:])):
            raise ValueError("oracle_modes must be non-empty and strictly increasing")
        if self.oracle_modes[0] < 1:
            raise ValueError("oracle_modes are positive integers")

        if self.kind in ("measure", "eps-sweep", "oracle-check"):
            try:
                self.sim.updated(horizon=self.burn_in + self.averaging_window)
            except ValidationError as exc:
                reason = exc.errors()[0]["msg"]
                raise ValueError(f"burn_in + averaging_window: {reason}") from None
        return self

    def with_overrides(self, kind=None, seed=None, out=None, format=None):
        """Re-validated copy with command-line overrides applied."""
        data = self.model_dump()
        if kind is not None:
            data["kind"] = kind
        if seed is not None:
            data["sim"]["seed"] = seed
        if out is not None:
            data["out"] = out
        if format is not None:
            data["format"] = format
        return _validate(data)


def _field_errors(exc):
    errors = []
    for error in exc.errors():
        location = ".".join(str(part) for part in error["loc"]) or "config"
        errors.append(f"{location}: {error['msg']}")
    return errors


def _validate(data):
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(_field_errors(exc)) from None


def parse_config(text):
    """Parse and validate a configuration document.

    Raises
    ------
    ConfigError
        With one ``"<key>: <reason>"`` entry per offending field.
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([f"document: {exc}"]) from None
    return _validate(data)


def load_config(path):
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise ConfigError([f"{path}: {exc.strerror or exc}"]) from None
    return parse_config(text)


def _format_value(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_format_value(v) for v in value) + "]"
    raise TypeError(f"cannot serialise {type(value).__name__}")


def serialize_config(config):
    """Flat dotted-key document that :func:`parse_config` maps back to ``config``."""
    data = config.model_dump()
    sim = data.pop("sim")
    lines = [f"{key} = {_format_value(value)}" for key, value in data.items()]
    lines += [f"sim.{key} = {_format_value(value)}" for key, value in sim.items()]
    return "\n".join(lines) + "\n"
