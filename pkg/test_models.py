#!/usr/bin/env python3
"""Tests for the built-in model registry and its acceptance runs."""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add the project directory to the path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from stochastica.advanced import Manifold  # noqa: E402
from stochastica.config import SimConfig  # noqa: E402
from stochastica.engine import prepare, simulate  # noqa: E402
from stochastica.error_estimates import NPLANES, ErrorPlanes, ErrorVector  # noqa: E402
from stochastica.exceptions import ConfigurationError  # noqa: E402
from stochastica.models import (  # noqa: E402
    MODELS,
    ModelEntry,
    ScanSpec,
    get_model,
    list_models,
)
from stochastica.results_file import ResultData  # noqa: E402


@pytest.mark.parametrize("name", sorted(MODELS))
def test_every_model_builds(name):
    entry = get_model(name)
    configs = entry.build()
    assert configs
    assert all(isinstance(cfg, SimConfig) for cfg in configs)
    # every sequence member must at least prepare cleanly
    for cfg in configs:
        cfg.grid_spec()
        cfg.resolved()


def test_unknown_model():
    with pytest.raises(ConfigurationError) as info:
        get_model("no_such_model")
    assert "wiener" in info.value.context["available"]


def test_list_is_sorted():
    names = [entry.name for entry in list_models()]
    assert names == sorted(names)
    assert len(names) == len(MODELS)


def test_scan_entry():
    entry = get_model("scanned_diffusion")
    assert isinstance(entry.scan, ScanSpec)
    assert entry.scan.key == "B"
    assert entry.scan.compare(math.sqrt(0.5)) == pytest.approx(5.0)


def test_heat_sequence_prepares_both_members():
    first, second = get_model("heat_sequence").build()
    assert prepare(first).cfg.name == "Heat test, spectral"
    assert second.transfer


def test_unknown_expectation_is_rejected():
    with pytest.raises(ConfigurationError) as info:
        ModelEntry("custom", "Custom model", lambda: [], {"sigmas": 3})
    assert info.value.context["keys"] == "sigmas"


def _compared_run(mean, compare):
    values = np.zeros((1, len(mean), NPLANES))
    values[..., 0] = mean
    values[..., 3] = compare
    graph = ErrorPlanes(values, (True, False, False, True, False, False))
    return ResultData(data=[[graph]], grids=[], configs=[])


def test_check_lists_each_missed_expectation():
    entry = ModelEntry("custom", "Custom model", lambda: [], {
        "comparison": 0.01, "chi2_per_k": (0.5, 2.0), "max_difference": 0.1})
    results = _compared_run([1.0, 2.0], [1.0, 2.3])
    missed = entry.check(ErrorVector(comparison=0.02, chi2_per_k=3.0), results)
    assert len(missed) == 3
    assert missed[0].startswith("comparison error 0.02")
    assert "outside [0.5, 2]" in missed[1]
    assert missed[2].startswith("largest difference 0.3")


def test_check_passes_when_expectations_hold():
    entry = ModelEntry("custom", "Custom model", lambda: [], {
        "chi2_per_k": (0.5, 2.0), "max_difference": 0.1})
    results = _compared_run([1.0, 2.0], [1.0, 2.05])
    assert entry.check(ErrorVector(chi2_per_k=0.5), results) == []


# Acceptance runs. Each model is run at its registered size and held to the
# registry's own expectations; statistical limits sit near three standard
# errors, deterministic ones well above the discretization error.


@pytest.mark.slow
@pytest.mark.parametrize("name", sorted(n for n, e in MODELS.items() if e.expected))
def test_model_meets_its_expectations(name):
    entry = get_model(name)
    vector, results = simulate(entry.build())
    assert entry.check(vector, results) == []


@pytest.mark.slow
def test_equilibrium_fits_with_and_without_step_averaging():
    _, results = simulate(get_model("equilibrium").build())
    # graph 1 samples |a|^2 at output times, graph 2 is the step-averaged spectrum
    for n in (1, 2):
        chi2 = results.graph(n).chi2
        assert chi2.k > 0
        assert 0.1 <= chi2.per_point <= 5.0


@pytest.mark.slow
def test_catenoid_trajectories_stay_on_the_surface():
    cfg = get_model("catenoid").build()[0].with_overrides(
        {"ensembles": [100, 4], "rawdata": True})
    _, results = simulate(cfg)
    surface = Manifold("catenoid")
    assert results.raw
    for cells in results.raw.values():
        assert np.max(np.abs(surface.constraint(cells[0]))) < 1e-6
    # <R^2> = 2t at t = 5, from 400 trajectories
    assert results.graph(2).mean[0, -1] == pytest.approx(10.0, rel=0.25)


@pytest.mark.slow
def test_gain_sequence_values():
    _, results = simulate(get_model("gain").build())
    loss = results.graph(1, sequence=1).mean[0]
    grow = results.graph(1, sequence=2).mean[0]
    assert np.allclose(loss, 1.0, atol=0.05)
    assert grow[0] == pytest.approx(1.0, abs=0.05)
    assert grow[-1] == pytest.approx(2 * math.exp(8.0) - 1, rel=0.03)


@pytest.mark.slow
def test_weightcheck_breeding_fraction():
    _, results = simulate(get_model("weightcheck").build())
    fraction = results.graph(2).mean
    assert np.all(np.isfinite(fraction))
    assert np.max(np.abs(fraction)) < 0.05
    assert results.graph(1).mean[0, -1] == pytest.approx(math.exp(-10.0), abs=0.02)


@pytest.mark.slow
def test_neumann_soliton_keeps_its_norm():
    _, results = simulate(get_model("nls_neumann").build())
    norm = results.graph(3).mean
    assert np.max(np.abs(norm - 2 * math.tanh(7.5))) < 1e-3


@pytest.mark.slow
def test_quantum_oscillator_output_is_flat():
    _, results = simulate(get_model("quantum_oscillator").build())
    inside = results.graph(1)
    assert np.max(np.abs(inside.mean - inside.plane(3))) < 0.2
    for n in (2, 3):
        assert np.mean(results.graph(n).mean) == pytest.approx(0.5, rel=0.05)
