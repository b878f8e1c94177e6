"""Fringe fitting, visibility and shot-noise sensitivity of the single-photon gyroscope."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np
import pandas as pd
from scipy.optimize import OptimizeWarning, curve_fit

from .core_optics import SagnacGeometry, scale_factor
from .experiment import FRINGE_COLUMNS
from .shared.constants import FIT_MAX_NFEV, FIT_XTOL, MIN_FIT_POINTS
from .shared.errors import DomainError, FitError

_LOGGER = logging.getLogger(__name__)

Weighting = Literal["none", "poisson"]


@dataclass(frozen=True)
class FringeFit:
    """N(Ω) = amplitude·sin²(π·Ω/(2·Ω_π) + phase_offset) + offset (cos² on port 2)."""

    port: int
    amplitude: float
    offset: float
    omega_pi_est: float
    phase_offset: float
    visibility: float
    residual_rms: float
    amplitude_stderr: float = math.nan
    offset_stderr: float = math.nan
    omega_pi_stderr: float = math.nan
    phase_offset_stderr: float = math.nan
    visibility_stderr: float = math.nan
    n_points: int = 0
    iterations: int = 0


def fringe_model(omega, amplitude, offset, omega_pi, phase_offset, port: int = 1):
    arg = 0.5 * np.pi * np.asarray(omega, dtype=float) / omega_pi + phase_offset
    shape = np.sin(arg) ** 2 if port == 1 else np.cos(arg) ** 2
    return amplitude * shape + offset


def visibility_from_fit(amplitude: float, offset: float) -> float:
    """amplitude / (amplitude + 2·offset), clamped to [0, 1]."""
    denom = amplitude + 2.0 * offset
    if denom <= 0:
        return 1.0 if amplitude > 0 else 0.0
    return float(min(1.0, max(0.0, amplitude / denom)))


def visibility_from_extrema(n_max: float, n_min: float) -> float:
    if n_max == 0 and n_min == 0:
        raise DomainError("visibility undefined for an empty fringe")
    if n_min < 0 or n_max < n_min:
        raise DomainError(f"need n_max >= n_min >= 0, got n_max={n_max}, n_min={n_min}")
    return (n_max - n_min) / (n_max + n_min)


def _fringe_arrays(fringe, port: int) -> tuple[np.ndarray, np.ndarray]:
    if not isinstance(fringe, pd.DataFrame):
        rows = list(fringe)
        width = len(rows[0]) if rows else len(FRINGE_COLUMNS)
        fringe = pd.DataFrame(rows, columns=FRINGE_COLUMNS[:width])
    column = "mean_net1" if port == 1 else "mean_net2"
    data = fringe[["omega", column]].dropna()
    return data["omega"].to_numpy(dtype=float), data[column].to_numpy(dtype=float)


def fit_fringe(
    fringe: pd.DataFrame | Iterable[Sequence[float]],
    port: int,
    init_omega_pi: float,
    weighting: Weighting = "none",
) -> FringeFit:
    """Least-squares fit of the interferometer fringe of one output port.

    Starts from amplitude = max − min, offset = min, the analytic Ω_π and zero
    phase. Raises FitError on too few points, flat data or non-convergence.
    """
    if port not in (1, 2):
        raise DomainError(f"port must be 1 or 2, got {port}")
    if not init_omega_pi > 0:
        raise DomainError(f"initial omega_pi must be positive, got {init_omega_pi}")
    omega, counts = _fringe_arrays(fringe, port)
    diagnostics: dict = {"port": port, "n_points": int(omega.size), "weighting": weighting}

    if omega.size < MIN_FIT_POINTS:
        raise FitError(f"need at least {MIN_FIT_POINTS} fringe points, got {omega.size}", diagnostics)
    span = float(omega.max() - omega.min())
    if span < init_omega_pi:
        diagnostics["omega_span"] = span
        raise FitError(f"fringe spans {span:.4g} rad/s, less than half a period ({init_omega_pi:.4g})", diagnostics)
    if np.ptp(counts) == 0:
        raise FitError("degenerate fringe: counts have zero variance", diagnostics)

    p0 = [float(counts.max() - counts.min()), float(counts.min()), init_omega_pi, 0.0]
    bounds = ([0.0, -np.inf, 1e-3 * init_omega_pi, -0.5 * np.pi], [np.inf, np.inf, np.inf, 0.5 * np.pi])
    sigma = np.sqrt(np.maximum(counts, 1.0)) if weighting == "poisson" else None

    def model(x, amplitude, offset, omega_pi, phase_offset):
        return fringe_model(x, amplitude, offset, omega_pi, phase_offset, port)

    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", OptimizeWarning)
            popt, pcov, infodict, _, _ = curve_fit(
                model,
                omega,
                counts,
                p0=p0,
                sigma=sigma,
                bounds=bounds,
                method="trf",
                full_output=True,
                max_nfev=FIT_MAX_NFEV,
                xtol=FIT_XTOL,
                ftol=1e-14,
                gtol=1e-14,
            )
    except (RuntimeError, ValueError) as exc:
        diagnostics.update({"initial": p0, "max_nfev": FIT_MAX_NFEV})
        _LOGGER.debug("Fringe fit failed on port %s: %s", port, exc)
        raise FitError(f"fit did not converge: {exc}", diagnostics) from exc

    amplitude, offset, omega_pi_est, phase_offset = (float(v) for v in popt)
    if not all(math.isfinite(v) for v in popt):
        raise FitError("fit converged to non-finite parameters", {**diagnostics, "parameters": list(popt)})

    residual = counts - model(omega, *popt)
    perr = np.sqrt(np.abs(np.diag(pcov))) if np.all(np.isfinite(pcov)) else np.full(4, np.nan)
    denom = amplitude + 2.0 * offset
    visibility_stderr = math.nan
    if denom > 0 and np.all(np.isfinite(pcov)):
        grad = np.array([2.0 * offset, -2.0 * amplitude]) / denom**2
        visibility_stderr = float(math.sqrt(max(0.0, grad @ pcov[:2, :2] @ grad)))

    fit = FringeFit(
        port=port,
        amplitude=amplitude,
        offset=offset,
        omega_pi_est=omega_pi_est,
        phase_offset=phase_offset,
        visibility=visibility_from_fit(amplitude, offset),
        residual_rms=float(np.sqrt(np.mean(residual**2))),
        amplitude_stderr=float(perr[0]),
        offset_stderr=float(perr[1]),
        omega_pi_stderr=float(perr[2]),
        phase_offset_stderr=float(perr[3]),
        visibility_stderr=visibility_stderr,
        n_points=int(omega.size),
        iterations=int(infodict.get("nfev", 0)),
    )
    _LOGGER.info(
        "Port %s fit: visibility=%.5f omega_pi=%.5f phase=%.4g rms=%.4g",
        port,
        fit.visibility,
        fit.omega_pi_est,
        fit.phase_offset,
        fit.residual_rms,
    )
    return fit


def phase_std(n_photons: float) -> float:
    """Shot-noise phase uncertainty 1/√(2N) at the Δφ = π/2 working point."""
    if not n_photons > 0:
        raise DomainError(f"photon number must be positive, got {n_photons}")
    return 1.0 / math.sqrt(2.0 * n_photons)


def integration_time_for_resolution(count_rate_hz: float, target_sigma_rad: float) -> float:
    if not (count_rate_hz > 0 and target_sigma_rad > 0):
        raise DomainError("count rate and target sigma must both be positive")
    return 1.0 / (2.0 * count_rate_hz * target_sigma_rad**2)


def binomial_count_std(n_gates: int, p: float) -> float:
    if n_gates < 0:
        raise DomainError(f"gate count must be non-negative, got {n_gates}")
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"probability must lie in [0, 1], got {p}")
    return math.sqrt(n_gates * p * (1.0 - p))


def omega_resolution(geom: SagnacGeometry, sigma_phase_rad: float) -> float:
    """Rotation-rate resolution for a phase resolution, inverting the Sagnac formula."""
    if sigma_phase_rad < 0:
        raise DomainError(f"phase resolution must be non-negative, got {sigma_phase_rad}")
    return sigma_phase_rad / scale_factor(geom)


SENSITIVITY_COLUMNS = [
    "count_rate_hz",
    "phase_std_1s_rad",
    "integration_time_s",
    "omega_resolution_rad_s",
    "omega_resolution_1s_rad_s",
]


def sensitivity_table(rates_hz: Iterable[float], target_sigma_rad: float, geom: SagnacGeometry) -> pd.DataFrame:
    rows = []
    for rate in rates_hz:
        sigma_1s = phase_std(rate)
        rows.append(
            [
                rate,
                sigma_1s,
                integration_time_for_resolution(rate, target_sigma_rad),
                omega_resolution(geom, target_sigma_rad),
                omega_resolution(geom, sigma_1s),
            ]
        )
    return pd.DataFrame(rows, columns=SENSITIVITY_COLUMNS)
