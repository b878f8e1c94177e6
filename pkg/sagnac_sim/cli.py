"""Command-line surface: design numbers, noise-free fringes, Monte Carlo runs, sensitivity."""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from . import analysis, core_optics, detector_model, experiment, source_model
from .analysis import FringeFit
from .config import SimulationConfig, load_config
from .shared.constants import (
    CLASSICAL_FOG_SIGMA_RAD,
    SAGNAC_SIM_LOG_LEVEL,
    STANDARD_SENSITIVITY_RATES_HZ,
)
from .shared.errors import EXIT_FIT_FAILURE, EXIT_OK, EXIT_USAGE, ConfigError, DomainError, FitError
from .shared.schema import FRINGE_CURVE_COLUMNS, frame_to_csv, records_to_csv
from .shared.utils import choose_seed, resolve_threads, run_records

_LOGGER = logging.getLogger(__name__)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def format_summary(pairs: list[tuple[str, object]]) -> str:
    return "\n".join(f"{key}={_fmt(value)}" for key, value in pairs)


@dataclass(frozen=True)
class DesignReport:
    omega_pi_rad_s: float
    propagation_time_s: float
    mean_occupancy: float
    scale_factor_rad_per_rad_s: float
    turn_count: float
    enclosed_area_m2: float
    heralded_photon_rate_hz: float
    heralded_g2: float
    dark_rate_port1_hz: float
    dark_rate_port2_hz: float
    rotation_decay_param: float
    rotation_total_turns: float

    def pairs(self) -> list[tuple[str, object]]:
        return list(self.__dict__.items())


def cmd_design(config: SimulationConfig) -> DesignReport:
    geom, src = config.geometry, config.source
    return DesignReport(
        omega_pi_rad_s=core_optics.omega_pi(geom),
        propagation_time_s=core_optics.propagation_time(geom),
        mean_occupancy=source_model.mean_occupancy(src, geom),
        scale_factor_rad_per_rad_s=core_optics.scale_factor(geom),
        turn_count=core_optics.turn_count(geom),
        enclosed_area_m2=core_optics.enclosed_area(geom),
        heralded_photon_rate_hz=source_model.heralded_photon_rate(src),
        heralded_g2=source_model.heralded_g2(src),
        dark_rate_port1_hz=detector_model.expected_dark_rate(config.detector1, config.run.gates_per_second),
        dark_rate_port2_hz=detector_model.expected_dark_rate(config.detector2, config.run.gates_per_second),
        rotation_decay_param=config.rotation.decay_param,
        rotation_total_turns=experiment.total_angle(config.rotation) / (2.0 * np.pi),
    )


def cmd_fringe(config: SimulationConfig, omega_min: float, omega_max: float, n_points: int) -> pd.DataFrame:
    """Noise-free port probabilities on an evenly spaced Ω grid.

    A single point is allowed when ``omega_min == omega_max``.
    """
    if n_points < 1:
        raise DomainError(f"need at least one point, got {n_points}")
    if n_points == 1 and omega_min != omega_max:
        raise DomainError("a single point needs omega_min == omega_max")
    if n_points > 1 and not omega_min < omega_max:
        raise DomainError(f"omega_min ({omega_min}) must be below omega_max ({omega_max})")
    omega = np.linspace(omega_min, omega_max, n_points)
    p_port1, p_port2 = core_optics.output_probabilities_array(core_optics.scale_factor(config.geometry) * omega)
    return pd.DataFrame({"omega_rad_s": omega, "p_port1": p_port1, "p_port2": p_port2})[FRINGE_CURVE_COLUMNS]


@dataclass
class RunSummary:
    seed: int
    seed_auto: bool
    n_records: int
    n_bins: int
    csv_path: str
    omega_pi_analytic: float
    fits: dict[int, FringeFit] = field(default_factory=dict)
    failures: dict[int, str] = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return EXIT_FIT_FAILURE if self.failures else EXIT_OK

    def pairs(self) -> list[tuple[str, object]]:
        pairs: list[tuple[str, object]] = [
            ("seed", self.seed),
            ("seed_auto", self.seed_auto),
            ("records", self.n_records),
            ("bins_per_record", self.n_bins),
            ("csv", self.csv_path),
            ("omega_pi_analytic", self.omega_pi_analytic),
        ]
        for port in (1, 2):
            if port in self.failures:
                pairs += [(f"port{port}_fit", "failed"), (f"port{port}_fit_error", self.failures[port])]
                continue
            fit = self.fits[port]
            pairs += [
                (f"port{port}_fit", "ok"),
                (f"port{port}_visibility", fit.visibility),
                (f"port{port}_visibility_stderr", fit.visibility_stderr),
                (f"port{port}_omega_pi", fit.omega_pi_est),
                (f"port{port}_omega_pi_stderr", fit.omega_pi_stderr),
                (f"port{port}_phase_offset", fit.phase_offset),
                (f"port{port}_residual_rms", fit.residual_rms),
            ]
        return pairs


def check_out_path(path: str | Path) -> Path:
    """``path`` as a Path, failing before any work when it cannot be written."""
    path = Path(path)
    if path.is_dir():
        raise DomainError(f"output path is a directory: {path}")
    if not path.parent.is_dir():
        raise DomainError(f"output directory does not exist: {path.parent}")
    return path


def write_text(path: Path, text: str) -> None:
    try:
        path.write_bytes(text.encode("utf-8"))
    except OSError as exc:
        raise DomainError(f"cannot write {path}: {exc.strerror or exc}") from exc


def cmd_run(
    config: SimulationConfig,
    seed: int | None,
    out_path: str | Path,
    threads: int | None = None,
    use_cache: bool = False,
) -> RunSummary:
    """Simulate, write the run CSV, average the records and fit both ports.

    The CSV is written before fitting, so it survives a fit failure.
    """
    seed, seed_auto = choose_seed(seed, config)
    out_path = check_out_path(out_path)
    records = run_records(config, seed, threads=resolve_threads(threads), use_cache=use_cache)
    write_text(out_path, records_to_csv(records))
    _LOGGER.info("Wrote %s bins to %s", len(records), out_path)
    summary, _ = fit_run(config, records, seed, seed_auto, csv_path=str(out_path))
    return summary


def fit_run(
    config: SimulationConfig,
    records: list[experiment.BinRecord],
    seed: int,
    seed_auto: bool,
    csv_path: str = "",
) -> tuple[RunSummary, pd.DataFrame]:
    """Average the records on the Ω grid and fit the fringe of both ports."""
    fringe = experiment.average_records(records, config.analysis.omega_grid_step)
    init = core_optics.omega_pi(config.geometry)
    summary = RunSummary(
        seed=seed,
        seed_auto=seed_auto,
        n_records=config.run.n_records,
        n_bins=experiment.bin_count(config.run, config.rotation),
        csv_path=csv_path,
        omega_pi_analytic=init,
    )
    for port in (1, 2):
        try:
            summary.fits[port] = analysis.fit_fringe(fringe, port, init, weighting=config.analysis.weighting)
        except FitError as exc:
            _LOGGER.warning("Port %s fit failed: %s %s", port, exc.reason, exc.diagnostics)
            summary.failures[port] = exc.reason
    return summary, fringe


@dataclass(frozen=True)
class SensitivityReport:
    count_rate_hz: float
    target_sigma_rad: float
    phase_std_1s_rad: float
    integration_time_s: float
    integration_time_h: float
    omega_resolution_rad_s: float
    classical_fog_sigma_rad: float
    table: pd.DataFrame

    def pairs(self) -> list[tuple[str, object]]:
        return [(key, value) for key, value in self.__dict__.items() if key != "table"]


def cmd_sensitivity(config: SimulationConfig, count_rate_hz: float, target_sigma_rad: float) -> SensitivityReport:
    integration = analysis.integration_time_for_resolution(count_rate_hz, target_sigma_rad)
    rates = sorted(set(STANDARD_SENSITIVITY_RATES_HZ) | {count_rate_hz})
    return SensitivityReport(
        count_rate_hz=count_rate_hz,
        target_sigma_rad=target_sigma_rad,
        phase_std_1s_rad=analysis.phase_std(count_rate_hz),
        integration_time_s=integration,
        integration_time_h=integration / 3600.0,
        omega_resolution_rad_s=analysis.omega_resolution(config.geometry, target_sigma_rad),
        classical_fog_sigma_rad=CLASSICAL_FOG_SIGMA_RAD,
        table=analysis.sensitivity_table(rates, target_sigma_rad, config.geometry),
    )


def _log_level(value: str) -> str:
    level = value.upper()
    if not isinstance(logging.getLevelName(level), int):
        raise argparse.ArgumentTypeError(f"unknown log level {value!r}")
    return level


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="config file (key = value); reference parameters when omitted")
    common.add_argument(
        "--log-level", type=_log_level, default=SAGNAC_SIM_LOG_LEVEL, help="logging level (default: %(default)s)"
    )

    parser = argparse.ArgumentParser(prog="sagnac-sim", description="Single-photon Sagnac interferometer simulator")
    subparsers = parser.add_subparsers(dest="command", required=True)

    subparsers.add_parser("design", parents=[common], help="Print Ω_π, propagation time, occupancy, scale factor")

    fringe = subparsers.add_parser("fringe", parents=[common], help="Noise-free fringe as CSV")
    fringe.add_argument("--omega-min", type=float, default=0.0)
    fringe.add_argument("--omega-max", type=float, default=10.0)
    fringe.add_argument("--points", type=int, default=101)
    fringe.add_argument("--out", help="CSV path (default: stdout)")

    run = subparsers.add_parser("run", parents=[common], help="Monte Carlo run, CSV plus fitted summary")
    run.add_argument("--seed", type=int, help="64-bit master seed (default: run.rng_seed, else random)")
    run.add_argument("--out", required=True, help="CSV path")
    run.add_argument("--threads", type=int, help="worker threads, 0 = all CPUs (default: SAGNAC_SIM_THREADS)")
    run.add_argument("--cache", action="store_true", help="reuse cached records of an identical run")

    sens = subparsers.add_parser("sensitivity", parents=[common], help="Shot-noise limited gyroscope sensitivity")
    sens.add_argument("--rate", type=float, default=1e7, help="detected photons per second (default: %(default)s)")
    sens.add_argument("--target-sigma", type=float, default=CLASSICAL_FOG_SIGMA_RAD, help="phase resolution (rad)")

    subparsers.add_parser("serve", parents=[common], help="Run the MCP tool server over stdio")
    return parser


def _serve() -> int:
    from . import prompts, resources  # noqa: F401  registers on import
    from .server import mcp
    from .tools import design, simulation  # noqa: F401

    mcp.run()
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=args.log_level, stream=sys.stderr)

    if args.command == "serve":
        return _serve()

    try:
        config = load_config(args.config)
        if args.command == "design":
            print(format_summary(cmd_design(config).pairs()))
        elif args.command == "fringe":
            csv_text = frame_to_csv(cmd_fringe(config, args.omega_min, args.omega_max, args.points), FRINGE_CURVE_COLUMNS)
            if args.out:
                write_text(check_out_path(args.out), csv_text)
            else:
                sys.stdout.write(csv_text)
        elif args.command == "run":
            summary = cmd_run(config, args.seed, args.out, threads=args.threads, use_cache=args.cache)
            print(format_summary(summary.pairs()))
            return summary.exit_code
        elif args.command == "sensitivity":
            report = cmd_sensitivity(config, args.rate, args.target_sigma)
            print(format_summary(report.pairs()))
            sys.stdout.write(frame_to_csv(report.table, list(report.table.columns)))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return exc.exit_code
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK
