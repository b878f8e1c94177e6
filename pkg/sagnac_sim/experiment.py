"""Monte Carlo replay of the rotating-loop measurement.

The loop spins down from ``omega_max``; heralded gates are spread over 300 ms
bins, every photon is routed to port 1 or port 2 with the interferometer
probabilities and the two gated APDs are sampled per gate. Each (record, bin)
cell draws from its own random substream, so the result does not depend on
how many worker threads evaluate the cells.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Literal

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import integrate, optimize

from .core_optics import SagnacGeometry, output_probabilities_array, scale_factor
from .detector_model import ApdSpec, expected_dark_rate, sample_clicks
from .shared.constants import (
    OMEGA_MAX_LIMIT,
    REFERENCE_BIN_TIME_S,
    REFERENCE_HERALD_RATE_HZ,
    REFERENCE_N_RECORDS,
    REFERENCE_OMEGA_GRID_STEP,
    REFERENCE_RECORD_DURATION_S,
    REFERENCE_TURNS,
    TWO_PI,
)
from .shared.errors import DomainError
from .source_model import HeraldedSourceSpec, sample_photon_numbers

_LOGGER = logging.getLogger(__name__)

_TIME_TOLERANCE = 1e-9


class DecayModel(str, Enum):
    LINEAR = "linear"
    EXPONENTIAL = "exponential"


def calibrate_decay_param(
    omega_max: float,
    duration_s: float,
    decay_model: DecayModel | str = DecayModel.LINEAR,
    turns: float = REFERENCE_TURNS,
) -> float:
    """Decay parameter for which the loop sweeps ``turns`` full turns within ``duration_s``.

    Linear: deceleration in rad/s². Exponential: time constant in seconds.
    """
    model = DecayModel(decay_model)
    angle = turns * TWO_PI
    if angle <= 0 or omega_max <= 0 or duration_s <= 0:
        raise DomainError("calibration needs positive omega_max, duration and turns")
    if angle >= omega_max * duration_s:
        raise DomainError(
            f"{turns:g} turns cannot be reached in {duration_s:g} s starting from {omega_max:g} rad/s"
        )
    if model is DecayModel.LINEAR:
        if angle <= 0.5 * omega_max * duration_s:
            # stops before the end of the record
            return omega_max**2 / (2.0 * angle)
        return 2.0 * (omega_max * duration_s - angle) / duration_s**2

    def excess(tau: float) -> float:
        return omega_max * tau * -math.expm1(-duration_s / tau) - angle

    return optimize.brentq(excess, 1e-6 * duration_s, 1e6 * duration_s, xtol=1e-12, rtol=1e-14)


class RotationProfile(BaseModel):
    """Spin-down of the loop under friction.

    ``decay_param`` left unset is calibrated so that the record sweeps ``turns`` turns.
    A linear profile with zero deceleration is a constant rotation rate.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    omega_max: float = Field(OMEGA_MAX_LIMIT, ge=0, le=OMEGA_MAX_LIMIT)
    decay_model: DecayModel = DecayModel.LINEAR
    decay_param: float = Field(ge=0)
    duration_s: float = Field(REFERENCE_RECORD_DURATION_S, gt=0)
    turns: float = Field(REFERENCE_TURNS, gt=0)

    @model_validator(mode="before")
    @classmethod
    def _calibrate(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        param = data.get("decay_param")
        if param is None or (isinstance(param, str) and param.strip().lower() in ("", "auto")):
            data = dict(data)
            data["decay_param"] = calibrate_decay_param(
                float(data.get("omega_max", OMEGA_MAX_LIMIT)),
                float(data.get("duration_s", REFERENCE_RECORD_DURATION_S)),
                data.get("decay_model", DecayModel.LINEAR),
                float(data.get("turns", REFERENCE_TURNS)),
            )
        return data

    @model_validator(mode="after")
    def _check_exponential(self) -> "RotationProfile":
        if self.decay_model is DecayModel.EXPONENTIAL and self.decay_param <= 0:
            raise ValueError("exponential decay needs a positive time constant")
        return self

    @classmethod
    def constant(cls, omega: float, duration_s: float = REFERENCE_RECORD_DURATION_S) -> "RotationProfile":
        return cls(omega_max=omega, decay_model=DecayModel.LINEAR, decay_param=0.0, duration_s=duration_s)


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    bin_time_s: float = Field(REFERENCE_BIN_TIME_S, gt=0)
    n_records: int = Field(REFERENCE_N_RECORDS, ge=1)
    gates_per_second: float = Field(REFERENCE_HERALD_RATE_HZ, ge=0)
    rng_seed: int | None = Field(None, ge=0, lt=2**64)
    gate_placement: Literal["lattice", "poisson"] = "lattice"


@dataclass(frozen=True, slots=True)
class BinRecord:
    """Counts of one integration bin of one record."""

    record_id: int
    bin_index: int
    t_start_s: float
    omega_mean: float
    omega_spread: float
    counts_port1: int
    counts_port2: int
    expected_dark1: float
    expected_dark2: float
    n_gates: int
    occupied_gates: int
    coincidences: int

    @property
    def expected_dark(self) -> float:
        return self.expected_dark1


def _omega_values(profile: RotationProfile, t: np.ndarray) -> np.ndarray:
    if profile.decay_model is DecayModel.LINEAR:
        return np.maximum(0.0, profile.omega_max - profile.decay_param * t)
    return profile.omega_max * np.exp(-t / profile.decay_param)


def omega_at(profile: RotationProfile, t: float) -> float:
    if not (-_TIME_TOLERANCE <= t <= profile.duration_s + _TIME_TOLERANCE):
        raise DomainError(f"t = {t} s outside the record [0, {profile.duration_s}]")
    return float(_omega_values(profile, np.asarray(min(max(t, 0.0), profile.duration_s))))


def omega_at_times(profile: RotationProfile, times: np.ndarray) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.size and (times.min() < -_TIME_TOLERANCE or times.max() > profile.duration_s + _TIME_TOLERANCE):
        raise DomainError(f"gate times outside the record [0, {profile.duration_s}]")
    return _omega_values(profile, times)


def total_angle(profile: RotationProfile) -> float:
    """Angle swept over the whole record, in radians."""
    breakpoints = None
    if profile.decay_model is DecayModel.LINEAR and profile.decay_param > 0:
        stop = profile.omega_max / profile.decay_param
        if 0 < stop < profile.duration_s:
            breakpoints = [stop]
    value, _ = integrate.quad(lambda t: omega_at(profile, t), 0.0, profile.duration_s, points=breakpoints, limit=200)
    return value


def bin_count(cfg: RunConfig, profile: RotationProfile) -> int:
    return int(math.floor(profile.duration_s / cfg.bin_time_s + _TIME_TOLERANCE))


def bin_edges(cfg: RunConfig, profile: RotationProfile) -> np.ndarray:
    return np.arange(bin_count(cfg, profile) + 1) * cfg.bin_time_s


def derive_cell_seed(master_seed: int, record_id: int, bin_index: int) -> np.random.SeedSequence:
    """Independent substream for one (record, bin) cell.

    The mixing is numpy's SeedSequence hash of ``master_seed`` with spawn key
    ``(record_id, bin_index)``; it is stable across numpy versions and platforms.
    """
    return np.random.SeedSequence(entropy=master_seed, spawn_key=(record_id, bin_index))


@dataclass(frozen=True)
class _RunContext:
    cfg: RunConfig
    geom: SagnacGeometry
    src: HeraldedSourceSpec
    det1: ApdSpec
    det2: ApdSpec
    profile: RotationProfile
    seed: int
    gates_per_bin: int
    dark1: float
    dark2: float
    phase_per_omega: float


def _simulate_cell(ctx: _RunContext, record_id: int, bin_index: int) -> BinRecord:
    rng = np.random.default_rng(derive_cell_seed(ctx.seed, record_id, bin_index))
    bin_time = ctx.cfg.bin_time_s
    t_start = bin_index * bin_time

    if ctx.cfg.gate_placement == "poisson":
        n_gates = int(rng.poisson(ctx.cfg.gates_per_second * bin_time))
        times = t_start + np.sort(rng.random(n_gates)) * bin_time
    else:
        n_gates = ctx.gates_per_bin
        times = t_start + (np.arange(n_gates) + 0.5) * (bin_time / max(n_gates, 1))

    omegas = omega_at_times(ctx.profile, times)
    if n_gates:
        omega_mean = float(omegas.mean())
        omega_spread = float(omegas.max() - omegas.min())
    else:
        ends = omega_at_times(ctx.profile, np.array([t_start, t_start + bin_time]))
        omega_mean = float(ends.mean())
        omega_spread = float(abs(ends[0] - ends[1]))

    p_port1, _ = output_probabilities_array(ctx.phase_per_omega * omegas)
    photons = sample_photon_numbers(ctx.src, rng, n_gates)
    if ctx.src.loop_injection_transmission < 1.0:
        photons = rng.binomial(photons, ctx.src.loop_injection_transmission)
    # photons are routed independently, first-order interference is per photon
    to_port1 = rng.binomial(photons, p_port1)
    to_port2 = photons - to_port1
    click1 = sample_clicks(ctx.det1, to_port1, rng)
    click2 = sample_clicks(ctx.det2, to_port2, rng)

    return BinRecord(
        record_id=record_id,
        bin_index=bin_index,
        t_start_s=t_start,
        omega_mean=omega_mean,
        omega_spread=omega_spread,
        counts_port1=int(click1.sum()),
        counts_port2=int(click2.sum()),
        expected_dark1=ctx.dark1,
        expected_dark2=ctx.dark2,
        n_gates=n_gates,
        occupied_gates=int(np.count_nonzero(photons)),
        coincidences=int(np.count_nonzero(click1 & click2)),
    )


def simulate_run(
    cfg: RunConfig,
    geom: SagnacGeometry,
    src: HeraldedSourceSpec,
    det1: ApdSpec,
    det2: ApdSpec,
    profile: RotationProfile,
    threads: int = 1,
) -> list[BinRecord]:
    """All bins of all records, ordered by (record_id, bin_index).

    ``threads`` only changes how the cells are scheduled, never their content.
    """
    if cfg.rng_seed is None:
        raise DomainError("rng_seed must be set before simulating")
    n_bins = bin_count(cfg, profile)
    if n_bins < 1:
        raise DomainError(f"record of {profile.duration_s} s holds no {cfg.bin_time_s} s bin")

    ctx = _RunContext(
        cfg=cfg,
        geom=geom,
        src=src,
        det1=det1,
        det2=det2,
        profile=profile,
        seed=cfg.rng_seed,
        gates_per_bin=int(round(cfg.gates_per_second * cfg.bin_time_s)),
        dark1=expected_dark_rate(det1, cfg.gates_per_second) * cfg.bin_time_s,
        dark2=expected_dark_rate(det2, cfg.gates_per_second) * cfg.bin_time_s,
        phase_per_omega=scale_factor(geom),
    )
    cells = [(r, b) for r in range(cfg.n_records) for b in range(n_bins)]
    _LOGGER.info(
        "Simulating %s records x %s bins, %s gates/bin, seed=%s, threads=%s",
        cfg.n_records,
        n_bins,
        ctx.gates_per_bin,
        cfg.rng_seed,
        threads,
    )

    if threads <= 1:
        return [_simulate_cell(ctx, r, b) for r, b in cells]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(lambda cell: _simulate_cell(ctx, *cell), cells))


def subtract_dark(rec: BinRecord) -> tuple[float, float]:
    """Net counts per port, floored at zero."""
    return (
        max(0.0, rec.counts_port1 - rec.expected_dark1),
        max(0.0, rec.counts_port2 - rec.expected_dark2),
    )


def records_frame(records: list[BinRecord]) -> pd.DataFrame:
    """Record list as a frame, with the dark-subtracted counts appended."""
    frame = pd.DataFrame([asdict(rec) for rec in records], columns=list(BinRecord.__dataclass_fields__))
    net = [subtract_dark(rec) for rec in records]
    frame["net_port1"] = [n1 for n1, _ in net]
    frame["net_port2"] = [n2 for _, n2 in net]
    return frame


FRINGE_COLUMNS = ["omega", "mean_net1", "mean_net2", "stderr1", "stderr2", "n_samples"]


def average_records(records: list[BinRecord], omega_grid_step: float = REFERENCE_OMEGA_GRID_STEP) -> pd.DataFrame:
    """Group the bins of all records on an Ω grid; per-cell mean and standard error of net counts.

    The cell abscissa is the mean ``omega_mean`` of its bins. A cell holding a
    single bin reports a standard error of 0.
    """
    if not records:
        raise DomainError("no records to average")
    if not omega_grid_step > 0:
        raise DomainError(f"grid step must be positive, got {omega_grid_step}")

    frame = records_frame(records)
    frame["cell"] = np.rint(frame["omega_mean"] / omega_grid_step).astype(np.int64)
    grouped = frame.groupby("cell", sort=True)
    fringe = pd.DataFrame(
        {
            "omega": grouped["omega_mean"].mean(),
            "mean_net1": grouped["net_port1"].mean(),
            "mean_net2": grouped["net_port2"].mean(),
            "stderr1": grouped["net_port1"].sem(ddof=1),
            "stderr2": grouped["net_port2"].sem(ddof=1),
            "n_samples": grouped.size(),
        }
    )
    fringe[["stderr1", "stderr2"]] = fringe[["stderr1", "stderr2"]].fillna(0.0)
    return fringe.reset_index(drop=True)[FRINGE_COLUMNS]
