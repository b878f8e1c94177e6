"""Gated InGaAs APD: threshold click model and dark-count background."""

from __future__ import annotations

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .shared.constants import (
    MAX_DARK_PROB_PER_GATE,
    REFERENCE_APD_EFFICIENCY,
    REFERENCE_DARK_PROB_PER_NS,
    REFERENCE_GATE_NS,
)
from .shared.errors import DomainError


class ApdSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    efficiency: float = Field(REFERENCE_APD_EFFICIENCY, ge=0, le=1)
    dark_prob_per_ns: float = Field(REFERENCE_DARK_PROB_PER_NS, ge=0)
    gate_ns: float = Field(REFERENCE_GATE_NS, gt=0)

    @model_validator(mode="after")
    def _check_dark(self) -> "ApdSpec":
        per_gate = self.dark_prob_per_ns * self.gate_ns
        if per_gate >= MAX_DARK_PROB_PER_GATE:
            raise ValueError(f"dark probability per gate {per_gate:.3g} must stay below {MAX_DARK_PROB_PER_GATE}")
        return self


def dark_prob_per_gate(spec: ApdSpec) -> float:
    return spec.dark_prob_per_ns * spec.gate_ns


def expected_dark_rate(spec: ApdSpec, trigger_rate_hz: float) -> float:
    """Mean dark clicks per second for a gate trigger rate."""
    if trigger_rate_hz < 0:
        raise DomainError(f"trigger rate must be non-negative, got {trigger_rate_hz}")
    return trigger_rate_hz * dark_prob_per_gate(spec)


def click_probability(spec: ApdSpec, photons_incident):
    """1 − (1−η)^n · (1 − p_dark); scalar or array ``photons_incident``."""
    no_photon_click = np.power(1.0 - spec.efficiency, photons_incident)
    return 1.0 - no_photon_click * (1.0 - dark_prob_per_gate(spec))


def sample_click(spec: ApdSpec, photons_incident: int, rng: np.random.Generator) -> bool:
    if photons_incident < 0:
        raise DomainError(f"photon number must be non-negative, got {photons_incident}")
    return bool(sample_clicks(spec, np.array([photons_incident]), rng)[0])


def sample_clicks(spec: ApdSpec, photons_incident: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One uniform draw per gate against the closed-form click probability."""
    p_click = click_probability(spec, np.asarray(photons_incident))
    return rng.random(p_click.shape) < p_click
