"""Tests for fringe fitting and the shot-noise sensitivity chain."""

import math

import numpy as np
import pandas as pd
import pytest

from sagnac_sim.analysis import (
    SENSITIVITY_COLUMNS,
    binomial_count_std,
    fit_fringe,
    fringe_model,
    integration_time_for_resolution,
    omega_resolution,
    phase_std,
    sensitivity_table,
    visibility_from_extrema,
    visibility_from_fit,
)
from sagnac_sim.core_optics import SagnacGeometry, omega_pi
from sagnac_sim.detector_model import ApdSpec
from sagnac_sim.experiment import FRINGE_COLUMNS, RotationProfile, RunConfig, average_records, simulate_run
from sagnac_sim.shared.errors import DomainError, FitError
from sagnac_sim.source_model import HeraldedSourceSpec

GEOM = SagnacGeometry.reference()
OMEGA_PI = omega_pi(GEOM)


def synthetic_fringe(amplitude=1000.0, offset=0.0, omega_pi_true=OMEGA_PI, phase=0.0, n_points=101):
    omega = np.linspace(0.0, 10.0, n_points)
    return pd.DataFrame(
        {
            "omega": omega,
            "mean_net1": fringe_model(omega, amplitude, offset, omega_pi_true, phase, port=1),
            "mean_net2": fringe_model(omega, amplitude, offset, omega_pi_true, phase, port=2),
            "stderr1": 0.0,
            "stderr2": 0.0,
            "n_samples": 1,
        }
    )[FRINGE_COLUMNS]


class TestFitFringe:
    """Least-squares fit of the port fringes."""

    @pytest.mark.parametrize("port", [1, 2])
    def test_noiseless_recovery(self, port):
        fit = fit_fringe(synthetic_fringe(), port, init_omega_pi=2.0)
        assert fit.port == port
        assert fit.amplitude == pytest.approx(1000.0, rel=1e-6)
        assert abs(fit.offset) < 1e-3
        assert fit.omega_pi_est == pytest.approx(OMEGA_PI, rel=1e-6)
        assert abs(fit.phase_offset) < 1e-6
        assert fit.visibility == pytest.approx(1.0, abs=1e-6)
        assert fit.residual_rms < 1e-3
        assert fit.n_points == 101
        assert fit.iterations > 0

    def test_offset_lowers_visibility(self):
        fit = fit_fringe(synthetic_fringe(offset=10.0), 1, OMEGA_PI)
        assert fit.amplitude == pytest.approx(1000.0, rel=1e-6)
        assert fit.offset == pytest.approx(10.0, rel=1e-6)
        assert fit.visibility == pytest.approx(1000 / 1020, rel=1e-6)
        assert fit.visibility == pytest.approx(0.980, abs=1e-3)

    def test_phase_offset_recovered(self):
        fit = fit_fringe(synthetic_fringe(phase=0.1), 2, OMEGA_PI)
        assert fit.phase_offset == pytest.approx(0.1, abs=1e-6)

    def test_accepts_row_tuples(self):
        frame = synthetic_fringe()
        rows = list(frame[["omega", "mean_net1", "mean_net2"]].itertuples(index=False, name=None))
        fit = fit_fringe(rows, 1, OMEGA_PI)
        assert fit.omega_pi_est == pytest.approx(OMEGA_PI, rel=1e-6)

    def test_poisson_weighting(self):
        fit = fit_fringe(synthetic_fringe(offset=5.0), 1, OMEGA_PI, weighting="poisson")
        assert fit.visibility == pytest.approx(1000 / 1010, rel=1e-6)

    def test_noisy_fit_has_standard_errors(self):
        frame = synthetic_fringe()
        rng = np.random.default_rng(17)
        frame["mean_net1"] = rng.poisson(frame["mean_net1"] + 1.0).astype(float)
        fit = fit_fringe(frame, 1, OMEGA_PI)
        assert fit.omega_pi_stderr > 0
        assert fit.visibility_stderr > 0
        assert abs(fit.omega_pi_est - OMEGA_PI) < 5 * fit.omega_pi_stderr

    def test_too_few_points(self):
        with pytest.raises(FitError) as exc_info:
            fit_fringe(synthetic_fringe(n_points=7), 1, OMEGA_PI)
        assert exc_info.value.diagnostics["n_points"] == 7

    def test_span_below_half_period(self):
        frame = synthetic_fringe()
        with pytest.raises(FitError):
            fit_fringe(frame[frame["omega"] < 1.5], 1, OMEGA_PI)

    def test_zero_variance(self):
        frame = synthetic_fringe()
        frame["mean_net1"] = 42.0
        with pytest.raises(FitError, match="zero variance"):
            fit_fringe(frame, 1, OMEGA_PI)

    def test_bad_port(self):
        with pytest.raises(DomainError):
            fit_fringe(synthetic_fringe(), 3, OMEGA_PI)


class TestVisibility:
    def test_extrema_examples(self):
        assert visibility_from_extrema(100, 0) == 1.0
        assert visibility_from_extrema(100, 100) == 0.0
        assert visibility_from_extrema(1000, 4) == pytest.approx(0.99203, abs=1e-5)

    def test_empty_fringe(self):
        with pytest.raises(DomainError):
            visibility_from_extrema(0, 0)

    def test_bad_ordering(self):
        with pytest.raises(DomainError):
            visibility_from_extrema(10, 20)

    def test_fit_and_extrema_agree(self):
        for amplitude, offset in [(1000.0, 10.0), (250.0, 0.5), (3.0, 7.0)]:
            assert visibility_from_fit(amplitude, offset) == pytest.approx(
                visibility_from_extrema(amplitude + offset, offset), abs=1e-12
            )

    def test_fit_visibility_clamped(self):
        assert visibility_from_fit(100.0, -10.0) == 1.0
        assert visibility_from_fit(0.0, 5.0) == 0.0


class TestSensitivity:
    """Shot-noise phase error and integration time."""

    def test_phase_std_examples(self):
        assert phase_std(0.5) == 1.0
        assert phase_std(5e11) == pytest.approx(1e-6, rel=1e-12)
        assert phase_std(4e6) == pytest.approx(phase_std(1e6) / 2, rel=1e-12)

    def test_integration_time(self):
        assert integration_time_for_resolution(1e7, 1e-6) == pytest.approx(5e4, rel=1e-12)
        assert integration_time_for_resolution(1e7, 1e-3) == pytest.approx(0.05, rel=1e-12)
        assert integration_time_for_resolution(2e7, 1e-6) == pytest.approx(2.5e4, rel=1e-12)

    def test_inverse_pair(self):
        for rate in (2e4, 1e5, 1e7):
            for sigma in (1e-6, 1e-3, 0.1):
                t = integration_time_for_resolution(rate, sigma)
                assert phase_std(rate * t) == pytest.approx(sigma, rel=1e-12)

    @pytest.mark.parametrize("bad", [0.0, -1.0])
    def test_non_positive_inputs(self, bad):
        with pytest.raises(DomainError):
            phase_std(bad)
        with pytest.raises(DomainError):
            integration_time_for_resolution(bad, 1e-6)
        with pytest.raises(DomainError):
            integration_time_for_resolution(1e7, bad)

    def test_binomial_count_std(self):
        assert binomial_count_std(0, 0.3) == 0.0
        assert binomial_count_std(10**6, 0.5) == 500.0
        with pytest.raises(DomainError):
            binomial_count_std(10, 1.5)

    def test_omega_resolution(self):
        assert omega_resolution(GEOM, math.pi) == pytest.approx(OMEGA_PI, rel=1e-12)
        assert omega_resolution(GEOM, 1e-6) == pytest.approx(6.72e-7, rel=1e-3)
        assert omega_resolution(GEOM, 0.0) == 0.0
        with pytest.raises(DomainError):
            omega_resolution(GEOM, -1.0)

    def test_sensitivity_table(self):
        table = sensitivity_table([2e4, 1e7], 1e-6, GEOM)
        assert list(table.columns) == SENSITIVITY_COLUMNS
        assert table["integration_time_s"].tolist() == pytest.approx([2.5e7, 5e4], rel=1e-12)
        assert table["omega_resolution_rad_s"].tolist() == pytest.approx([6.72e-7, 6.72e-7], rel=1e-3)


class TestDeskScaleRun:
    """Full Monte Carlo at reference parameters with 10⁴ gates per bin."""

    @pytest.fixture(scope="class")
    def fringe(self):
        apd = ApdSpec()
        cfg = RunConfig(n_records=5, gates_per_second=1e4 / 0.3, rng_seed=20240917)
        records = simulate_run(cfg, GEOM, HeraldedSourceSpec(), apd, apd, RotationProfile())
        assert records[0].n_gates == 10_000
        assert records[0].expected_dark1 == pytest.approx(2.5)
        return average_records(records, 0.1)

    @pytest.mark.parametrize("port", [1, 2])
    def test_net_visibility(self, fringe, port):
        fit = fit_fringe(fringe, port, OMEGA_PI, weighting="poisson")
        assert fit.visibility >= 0.99
        assert abs(fit.omega_pi_est - OMEGA_PI) < 3 * fit.omega_pi_stderr
        assert abs(fit.phase_offset) < 0.05

    def test_ports_agree_on_omega_pi(self, fringe):
        fit1 = fit_fringe(fringe, 1, OMEGA_PI, weighting="poisson")
        fit2 = fit_fringe(fringe, 2, OMEGA_PI, weighting="poisson")
        combined = math.hypot(fit1.omega_pi_stderr, fit2.omega_pi_stderr)
        assert abs(fit1.omega_pi_est - fit2.omega_pi_est) < 3 * combined
