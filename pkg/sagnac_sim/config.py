"""Line-oriented ``key = value`` configuration with dotted keys."""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from .core_optics import SagnacGeometry
from .detector_model import ApdSpec
from .experiment import RotationProfile, RunConfig
from .shared.constants import REFERENCE_OMEGA_GRID_STEP
from .shared.errors import ConfigError
from .source_model import HeraldedSourceSpec

_LOGGER = logging.getLogger(__name__)

_NULL_VALUES = {"", "auto", "none"}


class AnalysisConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    omega_grid_step: float = Field(REFERENCE_OMEGA_GRID_STEP, gt=0)
    weighting: Literal["none", "poisson"] = "none"


class SimulationConfig(BaseModel):
    """Every tunable of a simulation, one section per owning type."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    geometry: SagnacGeometry
    source: HeraldedSourceSpec = Field(default_factory=HeraldedSourceSpec)
    detector1: ApdSpec = Field(default_factory=ApdSpec)
    detector2: ApdSpec = Field(default_factory=ApdSpec)
    rotation: RotationProfile = Field(default_factory=RotationProfile)
    run: RunConfig = Field(default_factory=RunConfig)
    analysis: AnalysisConfig = Field(default_factory=AnalysisConfig)

    @classmethod
    def reference(cls) -> "SimulationConfig":
        return parse_config_text(REFERENCE_CONFIG_TEXT)


SECTIONS = tuple(SimulationConfig.model_fields)

REFERENCE_CONFIG_TEXT = """\
# Single-photon Sagnac loop: 550 m of fibre on a 20 cm spool, 1550 nm heralded photons.
geometry.fiber_length_m = 550
geometry.coil_diameter_m = 0.2
geometry.wavelength_m = 1550e-9
geometry.group_index = 1.468

source.herald_rate_hz = 1e5
source.p0 = 0.81
source.p1 = 0.17
source.p2 = 0.005
source.loop_injection_transmission = 1.0

detector1.efficiency = 0.1
detector1.dark_prob_per_ns = 5e-5
detector1.gate_ns = 5
detector2.efficiency = 0.1
detector2.dark_prob_per_ns = 5e-5
detector2.gate_ns = 5

# spin-down from the stage limit; decay_param = auto sweeps `turns` turns in duration_s
rotation.omega_max = 10
rotation.decay_model = linear
rotation.decay_param = auto
rotation.duration_s = 60
rotation.turns = 40

run.bin_time_s = 0.3
run.n_records = 5
run.gates_per_second = 1e5
run.gate_placement = lattice

analysis.omega_grid_step = 0.1
analysis.weighting = none
"""


def parse_config_lines(text: str) -> dict[str, dict[str, str | None]]:
    sections: dict[str, dict[str, str | None]] = {}
    problems: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append((f"line {lineno}", f"expected 'key = value', got {raw.strip()!r}"))
            continue
        key, value = (part.strip() for part in line.split("=", 1))
        parts = key.split(".")
        if len(parts) != 2 or not all(parts):
            problems.append((key or f"line {lineno}", "keys must look like 'section.field'"))
            continue
        section, field = parts
        if section not in SECTIONS:
            problems.append((key, f"unknown section '{section}'"))
            continue
        if field in sections.setdefault(section, {}):
            problems.append((key, f"duplicate key (line {lineno})"))
            continue
        sections[section][field] = None if value.lower() in _NULL_VALUES else value
    if problems:
        raise ConfigError(problems)
    return sections


def _dotted(loc: tuple) -> str:
    return ".".join(str(part) for part in loc if not isinstance(part, int))


def parse_config_text(text: str) -> SimulationConfig:
    sections = parse_config_lines(text)
    # "auto" and empty values fall back to the field default
    payload = {
        name: {field: value for field, value in sections.get(name, {}).items() if value is not None}
        for name in SECTIONS
    }
    try:
        return SimulationConfig.model_validate(payload)
    except ValidationError as exc:
        problems = [(_dotted(err["loc"]), err["msg"]) for err in exc.errors()]
        raise ConfigError(problems) from exc
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def config_from_text(text: str | None) -> SimulationConfig:
    """Parsed ``text``; the reference configuration when ``text`` is empty."""
    if text is None or not text.strip():
        return SimulationConfig.reference()
    return parse_config_text(text)


def load_config(path: str | Path | None) -> SimulationConfig:
    """Config file at ``path``; the reference configuration when ``path`` is None."""
    if path is None:
        return SimulationConfig.reference()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError([(str(path), f"cannot read config: {exc.strerror or exc}")]) from exc
    _LOGGER.info("Loading config %s", path)
    return parse_config_text(text)
