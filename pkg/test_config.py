#!/usr/bin/env python3
"""Tests for simulation parameters, environment settings and shared utilities."""

import sys
import time
from pathlib import Path

import pytest

# Add the project directory to the path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from shared.utils import (  # noqa: E402
    Timer,
    create_error_response,
    validate_environment,
)
from stochastica.config import (  # noqa: E402
    DEFAULT_POINTS,
    DEFAULT_SPACE_POINTS,
    EngineSettings,
    build_config,
    parse_value,
)
from stochastica.exceptions import ConfigurationError  # noqa: E402


class TestSimConfig:
    """Parameter defaults and validation."""

    def test_defaults(self):
        cfg = build_config()
        assert cfg.fields == [1]
        assert cfg.ensembles == [1, 1, 1]
        assert cfg.noise_count == 1
        assert cfg.inrandom_count == 1
        assert cfg.stochastic
        assert cfg.method_name == "MP"
        assert cfg.graphs == 0

    def test_deterministic_default_method(self):
        cfg = build_config(noises=0)
        assert not cfg.stochastic
        assert cfg.method_name == "RK4"

    def test_single_callbacks_become_lists(self):
        cfg = build_config(observe=lambda a, p: a, fields=2)
        assert len(cfg.observe) == 1
        assert cfg.fields == [2]
        assert cfg.graphs == 1

    def test_grid_spec_defaults(self):
        spec = build_config(dimensions=3, ranges=[2.0, 4.0]).grid_spec()
        assert spec.points == [DEFAULT_POINTS, DEFAULT_SPACE_POINTS, DEFAULT_SPACE_POINTS]
        assert spec.origins == [0.0, -2.0, -5.0]
        assert build_config().grid_spec(time_origin=3.0).origins == [3.0]
        assert build_config(origins=[1.0]).grid_spec(time_origin=3.0).origins == [1.0]

    def test_invalid_method(self):
        with pytest.raises(ConfigurationError):
            build_config(method="Leapfrog")

    def test_unknown_parameter(self):
        with pytest.raises(ConfigurationError):
            build_config(pionts=[3])

    def test_weights_need_two_components(self):
        with pytest.raises(ConfigurationError):
            build_config(thresholdw=0.1)
        assert build_config(thresholdw=0.1, fields=[2]).weighted

    def test_ensembles_are_padded(self):
        assert build_config(ensembles=[10]).ensembles == [10, 1, 1]
        with pytest.raises(ConfigurationError):
            build_config(ensembles=[0])

    def test_boundary_matrix(self):
        cfg = build_config(dimensions=2, fields=[2],
                           boundaries=[{2: [[1, 1], [-1, 1]]}])
        assert cfg.boundary_matrix(0, 2) == [[1, 1], [-1, 1]]
        assert build_config(dimensions=2).boundary_matrix(0, 2) == [[0, 0]]
        mixed = build_config(dimensions=2, boundaries={2: [[0, 1]]})
        with pytest.raises(ConfigurationError):
            mixed.boundary_matrix(0, 2)
        short = build_config(dimensions=2, fields=[3], boundaries={2: [[1, 1], [1, 1]]})
        with pytest.raises(ConfigurationError):
            short.boundary_matrix(0, 2)

    def test_averages_select_graphs(self):
        cfg = build_config(observe=[None, None, None], averages=[3, 1, 7])
        assert cfg.computed_graphs() == [2, 0]

    def test_resolved_record_skips_callbacks(self):
        record = build_config(deriv=lambda a, w, p: w, points=[5]).resolved()
        assert "deriv" not in record
        assert record["points"] == [5]
        assert record["method"] == "MP"
        assert record["noises"] == 1


class TestOverrides:
    """Command-line style overrides."""

    def test_string_values_are_parsed(self):
        cfg = build_config().with_overrides({"points": "11", "ensembles": "10,2"})
        assert cfg.points == [11]
        assert cfg.ensembles == [10, 2, 1]

    def test_indexed_override(self):
        cfg = build_config(dimensions=2, ranges=[1.0, 5.0])
        assert cfg.with_overrides({"ranges.2": "8"}).ranges == [1.0, 8.0]

    def test_capitalized_keys_are_constants(self):
        cfg = build_config(constants={"K": 1.0}).with_overrides({"K": "2.5", "G": "1"})
        assert cfg.constants == {"K": 2.5, "G": 1}

    def test_unknown_key(self):
        with pytest.raises(ConfigurationError):
            build_config().with_overrides({"bogus": "1"})

    def test_override_is_validated(self):
        with pytest.raises(ConfigurationError):
            build_config().with_overrides({"method": "Leapfrog"})

    def test_override_keeps_callbacks(self):
        cfg = build_config(observe=lambda a, p: a).with_overrides({"seed": "4"})
        assert cfg.seed == 4
        assert len(cfg.observe) == 1


@pytest.mark.parametrize("text,expected", [
    ("3", 3),
    ("2.5", 2.5),
    ("true", True),
    ("MP", "MP"),
    ("1, 2.5,", [1, 2.5]),
])
def test_parse_value(text, expected):
    assert parse_value(text) == expected


class TestEngineSettings:
    """Environment-driven settings."""

    def test_defaults(self, monkeypatch):
        for var in ("STOCHASTICA_SEED", "STOCHASTICA_LOG_LEVEL", "STOCHASTICA_MAX_WORKERS"):
            monkeypatch.delenv(var, raising=False)
        settings = EngineSettings()
        assert settings.seed_override is None
        assert settings.log_level == "INFO"
        assert settings.validate() == (True, None)

    def test_bad_log_level(self, monkeypatch):
        monkeypatch.setenv("STOCHASTICA_LOG_LEVEL", "LOUD")
        ok, message = EngineSettings().validate()
        assert not ok
        assert "LOUD" in message

    def test_bad_worker_count(self, monkeypatch):
        monkeypatch.setenv("STOCHASTICA_MAX_WORKERS", "0")
        ok, _ = EngineSettings().validate()
        assert not ok


def test_timer():
    with Timer() as timer:
        time.sleep(0.01)
    assert timer.elapsed is not None and timer.elapsed >= 0.005


def test_error_response():
    response = create_error_response("boom", "DivergenceError")
    assert response["error"] is True
    assert response["error_code"] == "DivergenceError"
    assert response["error_message"] == "boom"


def test_validate_environment_lists_packages():
    result = validate_environment()
    assert "numpy" in result["packages"] or "numpy" in result["missing_required"]
