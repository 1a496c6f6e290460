"""
Plain-text run configuration.

One ``key = value`` per line, ``#`` starts a comment, unknown keys are
rejected. Parsing reuses python-dotenv's line grammar; validation is done by
the pydantic models. Example::

    # solver
    a = 4.0
    mode = TLSM
    # noise
    footprint_amplitude = 0.2
    # data
    n1 = 40
    events = 0.1:0.001:0.0:1.0; 0.15:-0.001:0.0005:-0.8
"""

import io
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from src.admm.state import SolverConfig
from src.data.noise import NoiseSpec
from src.data.synthetic import DEFAULT_DT, DEFAULT_PEAK_FREQ, EventSpec, default_events

SOLVER_KEYS = tuple(SolverConfig.model_fields)
NOISE_KEYS = tuple(NoiseSpec.model_fields)
DATA_KEYS = ("n1", "n2", "n3", "dt", "peak_freq", "events")


class RunConfigError(ValueError):
    """Unparseable or invalid run configuration."""


class DataSpec(BaseModel):
    """Synthetic volume geometry and wavelet."""
    model_config = ConfigDict(extra="forbid")

    n1: int = Field(40, ge=1)
    n2: int = Field(64, ge=1)
    n3: int = Field(128, ge=1)
    dt: float = Field(DEFAULT_DT, gt=0)
    peak_freq: float = Field(DEFAULT_PEAK_FREQ, gt=0)
    events: List[EventSpec] = Field(default_factory=list)

    @property
    def dims(self) -> Tuple[int, int, int]:
        return (self.n1, self.n2, self.n3)


class RunConfig(BaseModel):
    """Solver, noise and data settings for one run."""
    model_config = ConfigDict(extra="forbid")

    solver: SolverConfig = Field(default_factory=SolverConfig)
    noise: NoiseSpec = Field(default_factory=NoiseSpec)
    data: DataSpec = Field(default_factory=DataSpec)

    @model_validator(mode="after")
    def _resolve_defaults(self) -> "RunConfig":
        # Size-dependent defaults are pinned so render/parse round-trips exactly.
        if not self.data.events:
            self.data.events = default_events(self.data.dims, self.data.dt)
        if self.noise.footprint_decay is None:
            self.noise = self.noise.model_copy(update={"footprint_decay": self.data.n3 / 4.0})
        return self


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if hasattr(value, "value"):
        return str(value.value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _format_events(events: List[EventSpec]) -> str:
    return "; ".join(
        ":".join(repr(float(v)) for v in (e.intercept_time, e.dip_inline, e.dip_crossline, e.amplitude))
        for e in events
    )


def _parse_events(text: str) -> List[EventSpec]:
    events = []
    for chunk in filter(None, (c.strip() for c in text.split(";"))):
        parts = chunk.split(":")
        if len(parts) != 4:
            raise RunConfigError(f"event {chunk!r} must have 4 ':'-separated fields")
        try:
            t0, p1, p2, amp = (float(p) for p in parts)
        except ValueError as exc:
            raise RunConfigError(f"event {chunk!r}: {exc}") from exc
        events.append(EventSpec(intercept_time=t0, dip_inline=p1, dip_crossline=p2, amplitude=amp))
    return events


def parse_text(text: str) -> RunConfig:
    """
    Parse configuration text.

    Raises:
        RunConfigError: On unknown keys, missing values or invalid settings
    """
    raw: Dict[str, Optional[str]] = dotenv_values(stream=io.StringIO(text), interpolate=False)
    sections: Dict[str, Dict[str, object]] = {"solver": {}, "noise": {}, "data": {}}
    for key, value in raw.items():
        if value is None:
            raise RunConfigError(f"key {key!r} has no value")
        if key in SOLVER_KEYS:
            sections["solver"][key] = value
        elif key in NOISE_KEYS:
            sections["noise"][key] = value
        elif key == "events":
            sections["data"][key] = _parse_events(value)
        elif key in DATA_KEYS:
            sections["data"][key] = value
        else:
            raise RunConfigError(f"unknown key {key!r}")
    try:
        return RunConfig(**sections)
    except ValidationError as exc:
        raise RunConfigError(str(exc)) from exc


def load_run_config(path: Union[str, Path, None]) -> RunConfig:
    """
    Read a config file; all defaults when ``path`` is None.

    Raises:
        OSError: If the file cannot be read
        RunConfigError: If its contents do not parse
    """
    if path is None:
        return RunConfig()
    text = Path(path).read_text(encoding="utf-8")
    return parse_text(text)


def render(cfg: RunConfig) -> str:
    """Serialize a config; ``parse_text(render(c)) == c``."""
    lines = ["# solver"]
    lines += [f"{k} = {_format_value(getattr(cfg.solver, k))}" for k in SOLVER_KEYS]
    lines.append("# noise")
    lines += [f"{k} = {_format_value(getattr(cfg.noise, k))}" for k in NOISE_KEYS]
    lines.append("# data")
    lines += [f"{k} = {_format_value(getattr(cfg.data, k))}" for k in DATA_KEYS if k != "events"]
    lines.append(f"events = {_format_events(cfg.data.events)}")
    return "\n".join(lines) + "\n"


def save_run_config(path: Union[str, Path], cfg: RunConfig) -> None:
    """Write a config file."""
    Path(path).write_text(render(cfg), encoding="utf-8")
