"""Run configuration: a YAML document validated against a strict schema.

Example::

    geometry:
      curve: {name: circle, params: {radius: 3.5}}
      rectangle: [-6, 6, -8, 8]
      level: 1
      degree: 3
    medium: {preset: star}
    wave: {k: pi/4, direction: [1, 0]}
    solver: {method: gmres, tol: 1.0e-8, N: 40}
    outputs: {directory: out, far_field_angles: 1000}

Wavenumbers may be written as numbers or as multiples of pi ("pi/4", "4pi").
Unknown keys anywhere in the document are rejected.
"""

from __future__ import annotations

import math
import re
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import ConfigurationError
from .geometry.curves import CURVES
from .geometry.media import MEDIA
from .geometry.mesh import MAX_DEGREE

ARTIFACTS = ("farfield", "solver_log", "summary", "raster", "overlap")
_PI_RE = re.compile(r"^\s*([0-9.eE+-]*)\s*\*?\s*pi\s*(?:/\s*([0-9.eE+-]+))?\s*$")


def parse_wavenumber(value):
    """Number or a string such as ``"pi/4"``, ``"4*pi"`` or ``"0.5"``."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        m = _PI_RE.match(value)
        if m:
            scale = float(m.group(1)) if m.group(1) else 1.0
            div = float(m.group(2)) if m.group(2) else 1.0
            return scale * math.pi / div
        try:
            return float(value)
        except ValueError:
            pass
    raise ValueError(f"cannot read a wavenumber from {value!r}")


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class CurveSettings(_Strict):
    name: str = "circle"
    params: Dict[str, float | Tuple[float, float]] = Field(default_factory=dict)

    @field_validator("name")
    @classmethod
    def _known(cls, v):
        if v not in CURVES:
            raise ValueError(f"unknown curve {v!r}; choose from {sorted(CURVES)}")
        return v


class GeometrySettings(_Strict):
    curve: CurveSettings = Field(
        default_factory=lambda: CurveSettings(name="circle", params={"radius": 3.5}))
    rectangle: Tuple[float, float, float, float] = (-6.0, 6.0, -8.0, 8.0)
    divisions: Optional[Tuple[int, int]] = None
    level: int = Field(1, ge=0, le=8)
    degree: int = Field(3, ge=1, le=MAX_DEGREE)

    @field_validator("rectangle")
    @classmethod
    def _ordered(cls, v):
        if not (v[0] < v[1] and v[2] < v[3]):
            raise ValueError("rectangle must be [xmin, xmax, ymin, ymax] with min < max")
        return v

    @field_validator("divisions")
    @classmethod
    def _positive(cls, v):
        if v is not None and min(v) < 1:
            raise ValueError("divisions must be positive")
        return v


class MediumSettings(_Strict):
    preset: str = "star"
    params: Dict[str, float | Tuple[float, float]] = Field(default_factory=dict)

    @field_validator("preset")
    @classmethod
    def _known(cls, v):
        if v not in MEDIA:
            raise ValueError(f"unknown medium {v!r}; choose from {sorted(MEDIA)}")
        return v


class WaveSettings(_Strict):
    k: float = math.pi / 4
    direction: Tuple[float, float] = (1.0, 0.0)
    amplitude: float = 1.0

    @field_validator("k", mode="before")
    @classmethod
    def _parse_k(cls, v):
        return parse_wavenumber(v)

    @field_validator("k")
    @classmethod
    def _positive(cls, v):
        if not v > 0:
            raise ValueError("wavenumber must be positive")
        return v

    @field_validator("direction")
    @classmethod
    def _unit(cls, v):
        if abs(math.hypot(*v) - 1.0) > 1e-10:
            raise ValueError("direction must be a unit vector")
        return v


class SolverSettings(_Strict):
    method: Literal["gmres", "direct"] = "gmres"
    tol: float = Field(1e-8, gt=0)
    N: int = Field(40, ge=2, le=1024)


class OutputSettings(_Strict):
    directory: str = "out"
    far_field_angles: int = Field(1000, ge=1)
    raster: Optional[Tuple[int, int]] = None
    overlap_samples: int = Field(200, ge=1)
    overlap_margin: float = Field(0.5, ge=0.0)
    seed: int = 0
    artifacts: List[Literal["farfield", "solver_log", "summary", "raster", "overlap"]] = Field(
        default_factory=lambda: ["farfield", "solver_log", "summary"])

    @model_validator(mode="after")
    def _raster_needs_size(self):
        if "raster" in self.artifacts and self.raster is None:
            raise ValueError("the raster artifact needs outputs.raster = [nx, ny]")
        return self


class RunConfig(_Strict):
    geometry: GeometrySettings = Field(default_factory=GeometrySettings)
    medium: MediumSettings = Field(default_factory=MediumSettings)
    wave: WaveSettings = Field(default_factory=WaveSettings)
    solver: SolverSettings = Field(default_factory=SolverSettings)
    outputs: OutputSettings = Field(default_factory=OutputSettings)

    def with_updates(self, **sections):
        """Copy with some fields of some sections replaced, e.g. ``solver={"N": 20}``."""
        data = self.model_dump()
        for name, values in sections.items():
            data[name].update(values)
        return RunConfig.model_validate(data)


def _format_error(exc: ValidationError):
    parts = []
    for err in exc.errors():
        loc = ".".join(str(p) for p in err["loc"])
        parts.append(f"{loc}: {err['msg']}")
    return "; ".join(parts)


def config_from_dict(data) -> RunConfig:
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigurationError("configuration must be a mapping")
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigurationError(f"invalid configuration: {_format_error(exc)}") from exc


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read configuration {path}: {exc}") from exc
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigurationError(f"malformed YAML in {path}: {exc}") from exc
    return config_from_dict(data)
