"""Heralded single-photon source, described only by its output statistics."""

from __future__ import annotations

import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .core_optics import SagnacGeometry, propagation_time
from .shared.constants import (
    HERALD_RATE_LIMIT_HZ,
    MAX_RESIDUAL_MASS,
    MAX_VACUUM_SLACK,
    REFERENCE_HERALD_RATE_HZ,
    REFERENCE_PHOTON_PROBS,
)

PHOTON_NUMBERS = np.array([0, 1, 2], dtype=np.int64)


class HeraldedSourceSpec(BaseModel):
    """Per-gate photon-number distribution and herald rate.

    The quoted probabilities are rounded and need not sum to one: the missing
    mass is vacuum, so ``p0`` only bounds the slack and the sampled P(0) is
    ``1 - p1 - p2 - p_multi``. ``p_multi`` is the mass above two photons,
    sampled as n = 2.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    herald_rate_hz: float = Field(REFERENCE_HERALD_RATE_HZ, ge=0, le=HERALD_RATE_LIMIT_HZ)
    p0: float = Field(
        REFERENCE_PHOTON_PROBS[0],
        ge=0,
        le=1,
        description="quoted vacuum probability; only checked against the slack, "
        "sampling uses 1 - p1 - p2 - p_multi",
    )
    p1: float = Field(REFERENCE_PHOTON_PROBS[1], ge=0, le=1)
    p2: float = Field(REFERENCE_PHOTON_PROBS[2], ge=0, le=1)
    p_multi: float = Field(0.0, ge=0, le=MAX_RESIDUAL_MASS)
    loop_injection_transmission: float = Field(1.0, ge=0, le=1)

    @model_validator(mode="after")
    def _check_mass(self) -> "HeraldedSourceSpec":
        total = self.p0 + self.p1 + self.p2 + self.p_multi
        if total > 1.0 + 1e-12:
            raise ValueError(f"photon-number probabilities sum to {total:.6g}, above 1")
        if 1.0 - total > MAX_VACUUM_SLACK:
            raise ValueError(f"probabilities sum to {total:.6g}; unassigned mass above {MAX_VACUUM_SLACK:g}")
        return self

    @property
    def distribution(self) -> np.ndarray:
        """Effective (P0, P1, P2) used for sampling."""
        p2 = self.p2 + self.p_multi
        return np.array([max(0.0, 1.0 - self.p1 - p2), self.p1, p2])

    @property
    def cumulative(self) -> np.ndarray:
        p = self.distribution
        return np.array([p[0], p[0] + p[1], 1.0])


def sample_photon_number(spec: HeraldedSourceSpec, rng: np.random.Generator) -> int:
    return int(sample_photon_numbers(spec, rng, 1)[0])


def sample_photon_numbers(spec: HeraldedSourceSpec, rng: np.random.Generator, size: int) -> np.ndarray:
    u = rng.random(size)
    return PHOTON_NUMBERS[np.searchsorted(spec.cumulative, u, side="right")]


def mean_photon_number(spec: HeraldedSourceSpec) -> float:
    return spec.p1 + 2.0 * (spec.p2 + spec.p_multi)


def heralded_photon_rate(spec: HeraldedSourceSpec) -> float:
    """Heralded photons per second injected into the loop."""
    return spec.herald_rate_hz * mean_photon_number(spec) * spec.loop_injection_transmission


def mean_occupancy(spec: HeraldedSourceSpec, geom: SagnacGeometry) -> float:
    """Expected number of photons simultaneously inside the loop."""
    return heralded_photon_rate(spec) * propagation_time(geom)


def heralded_g2(spec: HeraldedSourceSpec) -> float:
    """Heralded autocorrelation estimate 2·P(2)/P(1)²; NaN without single photons."""
    if spec.p1 == 0:
        return math.nan
    return 2.0 * (spec.p2 + spec.p_multi) / spec.p1**2


def multi_photon_fraction(spec: HeraldedSourceSpec) -> float:
    """Share of non-empty gates that carry two photons."""
    occupied = spec.p1 + spec.p2 + spec.p_multi
    return (spec.p2 + spec.p_multi) / occupied if occupied > 0 else 0.0
