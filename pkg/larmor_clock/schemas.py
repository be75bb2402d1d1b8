"""
Scenario configuration, sweep ranges and output records.

All quantities are in natural units: energies in m c^2, lengths in hbar/(m c),
times in hbar/(m c^2).
"""

import math
from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from larmor_clock.config import get_settings

settings = get_settings()

AXES = ("E", "d", "U0", "V", "n_segments")

CSV_HEADER = (
    "axis_value", "E", "m", "V", "theta", "phi", "n_segments",
    "T_re", "T_im", "R_re", "R_im", "alpha", "beta",
    "tau_T", "tau_R", "tau_L", "tau_D", "tau_free",
    "s1", "s2", "s3", "unitarity_residual", "converged",
)


class ParticleConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    m: float = Field(1.0, gt=0, description="rest mass (natural units, default 1)")
    E: float = Field(..., description="total energy in units of m c^2; must exceed m")

    @field_validator("E")
    @classmethod
    def above_rest_energy(cls, value, info):
        m = info.data.get("m", 1.0)
        if not (math.isfinite(value) and value > m):
            raise ValueError(f"E = {value} must exceed the rest energy m = {m}")
        return value


class FieldConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    V: float = Field(1e-6, ge=0, description="spin-field energy hbar omega_L / 2, confined to the barrier")


class RectangularSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["rectangular"] = "rectangular"
    U0: float = Field(..., gt=0, description="barrier height")
    d: float = Field(..., gt=0, description="half width; the barrier occupies [-d, d]")


class PiecewiseSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["piecewise"] = "piecewise"
    segments: List[Tuple[float, float]] = Field(..., min_length=1, description="(length, height) steps, left to right")

    @field_validator("segments")
    @classmethod
    def positive_lengths(cls, value):
        for length, height in value:
            if not (math.isfinite(length) and length > 0):
                raise ValueError(f"segment length must be positive, got {length}")
            if not math.isfinite(height):
                raise ValueError(f"segment height must be finite, got {height}")
        return value


class GaussianSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["gaussian"] = "gaussian"
    U0: float = Field(..., gt=0)
    width: float = Field(..., gt=0, description="U(x) = U0 exp(-x^2 / width^2)")
    cutoff: float = Field(4.0, gt=0, description="support is |x| <= cutoff * width")
    samples: int = Field(2001, ge=3)


class SampledSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["sampled"] = "sampled"
    points: List[Tuple[float, float]] = Field(..., min_length=2, description="(x, U) pairs, x strictly increasing")

    @field_validator("points")
    @classmethod
    def increasing_positions(cls, value):
        xs = [x for x, _ in value]
        if any(b <= a for a, b in zip(xs, xs[1:])):
            raise ValueError("sample positions must be strictly increasing")
        if not all(math.isfinite(x) and math.isfinite(u) for x, u in value):
            raise ValueError("samples must be finite")
        return value


BarrierSpec = Annotated[
    Union[RectangularSpec, PiecewiseSpec, GaussianSpec, SampledSpec],
    Field(discriminator="kind"),
]


class SpinConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    theta: float = Field(math.pi / 2, ge=0, le=math.pi)
    phi: float = Field(0.0, ge=0, lt=2 * math.pi)


class NumericsConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_segments: int = Field(default_factory=lambda: settings.DEFAULT_SEGMENTS, ge=1,
                            description="midpoint segments for smooth profiles")
    fd_step: float = Field(default_factory=lambda: settings.FD_STEP, gt=0)
    unitarity_tol: float = Field(default_factory=lambda: settings.UNITARITY_TOL, gt=0)
    richardson: bool = False


class ScenarioConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    particle: ParticleConfig
    field: FieldConfig = Field(default_factory=FieldConfig)
    barrier: BarrierSpec
    spin: SpinConfig = Field(default_factory=SpinConfig)
    numerics: NumericsConfig = Field(default_factory=NumericsConfig)

    def with_axis(self, axis: str, value: float) -> "ScenarioConfig":
        """Copy with one sweep axis set; validated like a fresh config."""
        data = self.model_dump()
        if axis == "E":
            data["particle"]["E"] = value
        elif axis == "V":
            data["field"]["V"] = value
        elif axis == "n_segments":
            data["numerics"]["n_segments"] = int(round(value))
        elif axis == "U0" and data["barrier"]["kind"] in ("rectangular", "gaussian"):
            data["barrier"]["U0"] = value
        elif axis == "d" and data["barrier"]["kind"] == "rectangular":
            data["barrier"]["d"] = value
        elif axis == "d" and data["barrier"]["kind"] == "gaussian":
            data["barrier"]["width"] = value
        else:
            raise ValueError(f"axis {axis!r} does not apply to a {data['barrier']['kind']} barrier")
        return ScenarioConfig.model_validate(data)


class SweepSpec(BaseModel):
    axis: Literal["E", "d", "U0", "V", "n_segments"]
    start: float
    stop: float
    count: int = Field(..., ge=2)
    spacing: Literal["linear", "log"] = "linear"

    @model_validator(mode="after")
    def ordered_range(self):
        if not self.start < self.stop:
            raise ValueError(f"start = {self.start} must be below stop = {self.stop}")
        if self.spacing == "log" and not self.start > 0:
            raise ValueError("log spacing needs a positive start")
        return self

    def values(self) -> List[float]:
        if self.spacing == "log":
            grid = np.geomspace(self.start, self.stop, self.count)
        else:
            grid = np.linspace(self.start, self.stop, self.count)
        return [float(v) for v in grid]


class OutputRecord(BaseModel):
    axis_value: float = math.nan
    E: float
    m: float
    V: float
    theta: float
    phi: float
    n_segments: int
    T_re: float = math.nan
    T_im: float = math.nan
    R_re: float = math.nan
    R_im: float = math.nan
    alpha: float = math.nan
    beta: float = math.nan
    tau_T: float = math.nan
    tau_R: float = math.nan
    tau_L: float = math.nan
    tau_D: float = math.nan
    tau_free: float = math.nan
    s1: float = math.nan
    s2: float = math.nan
    s3: float = math.nan
    unitarity_residual: float = math.nan
    converged: bool = False
    error: Optional[str] = Field(None, exclude=True)

    def to_row(self) -> List[str]:
        data = self.model_dump()
        return [_format_cell(data[name]) for name in CSV_HEADER]

    def to_json_dict(self) -> Dict[str, Any]:
        """JSON-safe dump: non-finite floats become null."""
        return {
            name: (None if isinstance(value, float) and not math.isfinite(value) else value)
            for name, value in self.model_dump().items()
        }


def _format_cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return f"{value:.17g}"


def config_schema() -> Dict[str, Any]:
    return ScenarioConfig.model_json_schema()
