"""Tests for the key = value configuration loader."""

from pathlib import Path

import pytest

from sagnac_sim.config import (
    REFERENCE_CONFIG_TEXT,
    SimulationConfig,
    config_from_text,
    load_config,
    parse_config_lines,
    parse_config_text,
)
from sagnac_sim.experiment import DecayModel
from sagnac_sim.shared.errors import EXIT_CONFIG_ERROR, ConfigError

REPO_ROOT = Path(__file__).resolve().parents[1]

GEOMETRY = """
geometry.fiber_length_m = 550
geometry.coil_diameter_m = 0.2
geometry.wavelength_m = 1550e-9
"""


class TestReferenceConfig:
    """The shipped reference configuration."""

    def test_file_matches_builtin_text(self):
        assert (REPO_ROOT / "configs" / "reference.conf").read_text(encoding="utf-8") == REFERENCE_CONFIG_TEXT

    def test_reference_values(self):
        config = SimulationConfig.reference()
        assert config.geometry.fiber_length_m == 550.0
        assert config.source.p2 == 0.005
        assert config.detector2.gate_ns == 5.0
        assert config.rotation.decay_model is DecayModel.LINEAR
        assert config.rotation.decay_param == pytest.approx(0.19894, abs=1e-5)
        assert config.run.n_records == 5
        assert config.run.rng_seed is None
        assert config.analysis.weighting == "none"

    def test_empty_text_means_reference(self):
        assert config_from_text(None) == SimulationConfig.reference()
        assert config_from_text("  \n") == SimulationConfig.reference()
        assert load_config(None) == SimulationConfig.reference()

    def test_load_from_file(self):
        assert load_config(REPO_ROOT / "configs" / "reference.conf") == SimulationConfig.reference()


class TestParsing:
    """Line syntax and defaults."""

    def test_geometry_only_uses_defaults(self):
        config = parse_config_text(GEOMETRY)
        assert config.source.p1 == 0.17
        assert config.geometry.group_index == 1.468
        assert config.run.bin_time_s == 0.3

    def test_comments_and_blank_lines(self):
        text = GEOMETRY + "\n# full-line comment\nrun.n_records = 3   # trailing comment\n\n"
        assert parse_config_text(text).run.n_records == 3

    def test_seed_and_enums(self):
        text = GEOMETRY + "run.rng_seed = 9007199254740993\nrun.gate_placement = poisson\n"
        text += "rotation.decay_model = exponential\nanalysis.weighting = poisson\n"
        config = parse_config_text(text)
        assert config.run.rng_seed == 2**53 + 1
        assert config.run.gate_placement == "poisson"
        assert config.rotation.decay_model is DecayModel.EXPONENTIAL
        assert config.rotation.decay_param == pytest.approx(28.66, abs=0.05)
        assert config.analysis.weighting == "poisson"

    def test_auto_and_none_fall_back_to_default(self):
        text = GEOMETRY + "rotation.decay_param = auto\nrun.rng_seed = none\n"
        config = parse_config_text(text)
        assert config.run.rng_seed is None
        assert config.rotation.decay_param == SimulationConfig.reference().rotation.decay_param

    def test_raw_sections(self):
        sections = parse_config_lines("run.n_records = 3\nrun.rng_seed = auto\n")
        assert sections == {"run": {"n_records": "3", "rng_seed": None}}


class TestErrors:
    """Every problem is reported against its dotted key."""

    def error_keys(self, text: str) -> list[str]:
        with pytest.raises(ConfigError) as exc_info:
            parse_config_text(text)
        assert exc_info.value.exit_code == EXIT_CONFIG_ERROR
        return [key for key, _ in exc_info.value.problems]

    def test_missing_geometry(self):
        keys = self.error_keys("source.p1 = 0.17")
        assert {"geometry.fiber_length_m", "geometry.coil_diameter_m", "geometry.wavelength_m"} <= set(keys)

    def test_missing_required_key(self):
        text = "geometry.fiber_length_m = 550\ngeometry.coil_diameter_m = 0.2\n"
        assert self.error_keys(text) == ["geometry.wavelength_m"]

    def test_unknown_field(self):
        assert "geometry.radius_m" in self.error_keys(GEOMETRY + "geometry.radius_m = 0.1\n")

    def test_invalid_value(self):
        assert "detector1.efficiency" in self.error_keys(GEOMETRY + "detector1.efficiency = 1.5\n")

    def test_not_a_number(self):
        assert "run.n_records" in self.error_keys(GEOMETRY + "run.n_records = five\n")

    def test_cross_field_rule(self):
        text = GEOMETRY + "source.p0 = 0.9\nsource.p1 = 0.2\n"
        assert "source" in self.error_keys(text)

    def test_duplicate_key(self):
        assert "run.n_records" in self.error_keys(GEOMETRY + "run.n_records = 3\nrun.n_records = 4\n")

    def test_missing_equals(self):
        assert "line 1" in self.error_keys("geometry.fiber_length_m 550\n" + GEOMETRY)

    def test_undotted_key(self):
        assert "fiber_length_m" in self.error_keys("fiber_length_m = 550\n")

    def test_problems_collected_together(self):
        keys = self.error_keys("foo.bar = 1\nrun = 3\nnonsense\n")
        assert len(keys) == 3

    def test_unreadable_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "missing.conf")
