"""Exact physics of the fibre Sagnac loop.

Sagnac phase from the coil geometry and the rotation rate, and propagation of a
one-photon two-mode state through the input beam splitter, the loop and the
output beam splitter. Everything here is deterministic and side-effect free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .shared.constants import (
    DEFAULT_GROUP_INDEX,
    REFERENCE_COIL_DIAMETER_M,
    REFERENCE_FIBER_LENGTH_M,
    REFERENCE_WAVELENGTH_M,
    SPEED_OF_LIGHT,
    TWO_PI,
)
from .shared.errors import DomainError

_INV_SQRT2 = 1.0 / math.sqrt(2.0)
NORM_TOLERANCE = 1e-12


class SagnacGeometry(BaseModel):
    """Fibre coil: length L, diameter D, wavelength and group index.

    The number of turns is not stored, it follows from L = N·π·D.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    fiber_length_m: float = Field(gt=0, description="fibre length L (m)")
    coil_diameter_m: float = Field(gt=0, description="coil diameter D (m)")
    wavelength_m: float = Field(gt=100e-9, lt=10e-6, description="vacuum wavelength (m)")
    group_index: float = Field(DEFAULT_GROUP_INDEX, gt=0, description="group index, propagation time only")

    @field_validator("fiber_length_m", "coil_diameter_m", "wavelength_m", "group_index")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("must be finite")
        return value

    @classmethod
    def reference(cls, **overrides) -> "SagnacGeometry":
        values = {
            "fiber_length_m": REFERENCE_FIBER_LENGTH_M,
            "coil_diameter_m": REFERENCE_COIL_DIAMETER_M,
            "wavelength_m": REFERENCE_WAVELENGTH_M,
        }
        values.update(overrides)
        return cls(**values)


@dataclass(frozen=True, slots=True)
class TwoModeState:
    """Single-photon amplitudes on the two interferometer ports, kept as real pairs."""

    a_re: float
    a_im: float
    b_re: float
    b_im: float

    def __post_init__(self) -> None:
        if not self.is_normalized():
            raise DomainError(f"state must be normalized, |a|²+|b|² = {self.norm_sq():.17g}")

    @classmethod
    def from_complex(cls, amp_a: complex, amp_b: complex) -> "TwoModeState":
        amp_a, amp_b = complex(amp_a), complex(amp_b)
        return cls(amp_a.real, amp_a.imag, amp_b.real, amp_b.imag)

    @classmethod
    def port(cls, index: int) -> "TwoModeState":
        """Photon entering port 1 (index 1) or port 2 (index 2)."""
        if index == 1:
            return cls(1.0, 0.0, 0.0, 0.0)
        if index == 2:
            return cls(0.0, 0.0, 1.0, 0.0)
        raise DomainError(f"port must be 1 or 2, got {index}")

    @property
    def amp_a(self) -> complex:
        return complex(self.a_re, self.a_im)

    @property
    def amp_b(self) -> complex:
        return complex(self.b_re, self.b_im)

    def norm_sq(self) -> float:
        return self.a_re**2 + self.a_im**2 + self.b_re**2 + self.b_im**2

    def probabilities(self) -> tuple[float, float]:
        return self.a_re**2 + self.a_im**2, self.b_re**2 + self.b_im**2

    def is_normalized(self, tol: float = NORM_TOLERANCE) -> bool:
        return abs(self.norm_sq() - 1.0) <= tol

    def as_vector(self) -> np.ndarray:
        return np.array([self.amp_a, self.amp_b], dtype=complex)


def sagnac_phase(geom: SagnacGeometry, omega: float) -> float:
    """Δφ = 2π·L·D·Ω / (λ·c); odd in Ω, independent of the group index."""
    return TWO_PI * geom.fiber_length_m * geom.coil_diameter_m * omega / (geom.wavelength_m * SPEED_OF_LIGHT)


def sagnac_phase_from_area(area_m2: float, omega: float, wavelength_m: float) -> float:
    """Δφ = 8π·A·Ω / (λ·c), area and rotation vector collinear."""
    if area_m2 < 0:
        raise DomainError(f"area must be non-negative, got {area_m2}")
    return 8.0 * math.pi * area_m2 * omega / (wavelength_m * SPEED_OF_LIGHT)


def omega_pi(geom: SagnacGeometry) -> float:
    """Rotation rate giving Δφ = π."""
    return geom.wavelength_m * SPEED_OF_LIGHT / (2.0 * geom.fiber_length_m * geom.coil_diameter_m)


def propagation_time(geom: SagnacGeometry) -> float:
    return geom.group_index * geom.fiber_length_m / SPEED_OF_LIGHT


def enclosed_area(geom: SagnacGeometry) -> float:
    """Total area of all turns, N·πD²/4 = L·D/4."""
    return geom.fiber_length_m * geom.coil_diameter_m / 4.0


def turn_count(geom: SagnacGeometry) -> float:
    return geom.fiber_length_m / (math.pi * geom.coil_diameter_m)


def scale_factor(geom: SagnacGeometry) -> float:
    """dΔφ/dΩ in rad per rad/s, equal to π/Ω_π."""
    return TWO_PI * geom.fiber_length_m * geom.coil_diameter_m / (geom.wavelength_m * SPEED_OF_LIGHT)


def apply_bs_in(state: TwoModeState) -> TwoModeState:
    """(1/√2)[[1, 1], [1, -1]]"""
    return TwoModeState(
        (state.a_re + state.b_re) * _INV_SQRT2,
        (state.a_im + state.b_im) * _INV_SQRT2,
        (state.a_re - state.b_re) * _INV_SQRT2,
        (state.a_im - state.b_im) * _INV_SQRT2,
    )


def apply_sagnac(state: TwoModeState, delta_phi: float) -> TwoModeState:
    """diag(1, e^{iΔφ})"""
    c, s = math.cos(delta_phi), math.sin(delta_phi)
    return TwoModeState(
        state.a_re,
        state.a_im,
        state.b_re * c - state.b_im * s,
        state.b_re * s + state.b_im * c,
    )


def apply_bs_out(state: TwoModeState) -> TwoModeState:
    """(1/√2)[[1, 1], [-1, 1]]; ports 3 and 4 swap roles after the loop."""
    return TwoModeState(
        (state.a_re + state.b_re) * _INV_SQRT2,
        (state.a_im + state.b_im) * _INV_SQRT2,
        (state.b_re - state.a_re) * _INV_SQRT2,
        (state.b_im - state.a_im) * _INV_SQRT2,
    )


def propagate(state: TwoModeState, delta_phi: float) -> TwoModeState:
    return apply_bs_out(apply_sagnac(apply_bs_in(state), delta_phi))


def output_probabilities(delta_phi: float) -> tuple[float, float]:
    """(sin²(Δφ/2), cos²(Δφ/2)) for a photon entering port 2."""
    p_port1 = math.sin(0.5 * delta_phi) ** 2
    return p_port1, 1.0 - p_port1


def output_probabilities_array(delta_phi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p_port1 = np.sin(0.5 * np.asarray(delta_phi, dtype=float)) ** 2
    return p_port1, 1.0 - p_port1


def bs_in_matrix() -> np.ndarray:
    return _INV_SQRT2 * np.array([[1, 1], [1, -1]], dtype=complex)


def sagnac_matrix(delta_phi: float) -> np.ndarray:
    return np.array([[1, 0], [0, np.exp(1j * delta_phi)]], dtype=complex)


def bs_out_matrix() -> np.ndarray:
    return _INV_SQRT2 * np.array([[1, 1], [-1, 1]], dtype=complex)


def interferometer_matrix(delta_phi: float) -> np.ndarray:
    """BS_out · S(Δφ) · BS_in"""
    return bs_out_matrix() @ sagnac_matrix(delta_phi) @ bs_in_matrix()
