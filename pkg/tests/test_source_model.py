"""Tests for the heralded single-photon source statistics."""

import math

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import stats

from sagnac_sim.core_optics import SagnacGeometry, propagation_time
from sagnac_sim.source_model import (
    HeraldedSourceSpec,
    heralded_g2,
    heralded_photon_rate,
    mean_occupancy,
    mean_photon_number,
    multi_photon_fraction,
    sample_photon_number,
    sample_photon_numbers,
)


@pytest.fixture
def spec():
    return HeraldedSourceSpec()


class TestHeraldedSourceSpec:
    """Validation of the photon-number distribution."""

    def test_reference_defaults(self, spec):
        assert (spec.p0, spec.p1, spec.p2) == (0.81, 0.17, 0.005)
        assert spec.herald_rate_hz == 1e5
        assert spec.loop_injection_transmission == 1.0

    def test_unassigned_mass_is_vacuum(self, spec):
        dist = spec.distribution
        assert dist.sum() == pytest.approx(1.0, abs=1e-15)
        assert dist[0] == pytest.approx(0.825)
        assert dist[1] == 0.17
        assert dist[2] == 0.005

    @pytest.mark.parametrize("p0", [0.78, 0.80, 0.81, 0.825])
    def test_quoted_p0_does_not_change_sampling(self, p0):
        spec = HeraldedSourceSpec(p0=p0, p1=0.17, p2=0.005)
        assert spec.distribution[0] == pytest.approx(0.825)
        assert spec.distribution.tolist() == HeraldedSourceSpec().distribution.tolist()

    def test_multi_photon_mass_folded_into_two(self):
        spec = HeraldedSourceSpec(p0=0.81, p1=0.17, p2=0.005, p_multi=5e-4)
        assert spec.distribution[2] == pytest.approx(5.5e-3)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"p0": 0.9, "p1": 0.2, "p2": 0.0},
            {"p0": 0.7, "p1": 0.17, "p2": 0.005},
            {"p_multi": 2e-3},
            {"herald_rate_hz": 1.3e5},
            {"p1": -0.1},
            {"loop_injection_transmission": 1.5},
        ],
    )
    def test_invalid_spec_rejected(self, kwargs):
        with pytest.raises(ValidationError):
            HeraldedSourceSpec(**kwargs)

    def test_saturation_limit_accepted(self):
        assert HeraldedSourceSpec(herald_rate_hz=1.2e5).herald_rate_hz == 1.2e5


class TestSamplePhotonNumber:
    """Per-gate photon-number sampling."""

    def test_deterministic_single_photon(self):
        spec = HeraldedSourceSpec(p0=0.0, p1=1.0, p2=0.0)
        rng = np.random.default_rng(5)
        assert all(sample_photon_number(spec, rng) == 1 for _ in range(1000))
        assert set(sample_photon_numbers(spec, rng, 10_000)) == {1}

    def test_same_stream_same_samples(self, spec):
        a = sample_photon_numbers(spec, np.random.default_rng(99), 1000)
        b = sample_photon_numbers(spec, np.random.default_rng(99), 1000)
        assert np.array_equal(a, b)

    def test_reference_distribution_goodness_of_fit(self, spec):
        n = 1_000_000
        samples = sample_photon_numbers(spec, np.random.default_rng(20240601), n)
        observed = np.bincount(samples, minlength=3)
        expected = spec.distribution * n
        _, p_value = stats.chisquare(observed, expected)
        assert p_value > 0.001

        freq = observed / n
        sigma = np.sqrt(spec.distribution * (1 - spec.distribution) / n)
        assert np.all(np.abs(freq - spec.distribution) < 3 * sigma)

    def test_mean_photon_number(self, spec):
        n = 1_000_000
        samples = sample_photon_numbers(spec, np.random.default_rng(7), n)
        assert mean_photon_number(spec) == pytest.approx(0.18)
        sigma = samples.std() / math.sqrt(n)
        assert abs(samples.mean() - 0.18) < 3 * sigma


class TestRates:
    """Injection rate, loop occupancy and multi-photon figures."""

    def test_heralded_photon_rate(self, spec):
        assert heralded_photon_rate(spec) == pytest.approx(1.8e4)
        assert heralded_photon_rate(spec) == pytest.approx(2e4, rel=0.15)

    def test_zero_transmission(self):
        assert heralded_photon_rate(HeraldedSourceSpec(loop_injection_transmission=0.0)) == 0.0

    def test_rate_linear_in_herald_rate_and_transmission(self, spec):
        half = HeraldedSourceSpec(herald_rate_hz=5e4)
        lossy = HeraldedSourceSpec(loop_injection_transmission=0.5)
        assert heralded_photon_rate(half) == pytest.approx(heralded_photon_rate(spec) / 2)
        assert heralded_photon_rate(lossy) == pytest.approx(heralded_photon_rate(spec) / 2)

    def test_single_photon_regime(self, spec):
        geom = SagnacGeometry.reference()
        occupancy = mean_occupancy(spec, geom)
        assert occupancy == pytest.approx(1.8e4 * propagation_time(geom))
        assert occupancy == pytest.approx(0.053, rel=0.1)
        assert occupancy < 0.1

    def test_occupancy_zero_without_heralds(self):
        assert mean_occupancy(HeraldedSourceSpec(herald_rate_hz=0.0), SagnacGeometry.reference()) == 0.0

    def test_heralded_g2(self, spec):
        assert heralded_g2(spec) == pytest.approx(2 * 0.005 / 0.17**2)
        assert heralded_g2(spec) == pytest.approx(0.35, abs=0.01)
        assert math.isnan(heralded_g2(HeraldedSourceSpec(p0=0.995, p1=0.0, p2=0.005)))

    def test_multi_photon_fraction(self, spec):
        assert multi_photon_fraction(spec) == pytest.approx(0.005 / 0.175)
        assert multi_photon_fraction(HeraldedSourceSpec(p0=1.0, p1=0.0, p2=0.0)) == 0.0
