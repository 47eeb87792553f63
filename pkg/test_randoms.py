#!/usr/bin/env python3
"""Tests for counter-based random streams and noise coarsening."""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add the project directory to the path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from stochastica.config import GridSpec  # noqa: E402
from stochastica.exceptions import (  # noqa: E402
    ConfigurationError,
    NoiseGenerationError,
    ShapeError,
)
from stochastica.lattice import build_grid  # noqa: E402
from stochastica.randoms import (  # noqa: E402
    NoiseSpec,
    RngState,
    coarsen_gaussian,
    coarsen_noise,
    coarsen_uniform,
    initial_randoms,
    propagation_noise,
)


@pytest.fixture
def line():
    return build_grid(GridSpec(dimensions=1, points=[2], ranges=[1.0], origins=[0.0]))


@pytest.fixture
def plane():
    return build_grid(GridSpec(dimensions=2, points=[2, 8], ranges=[1.0, 4.0],
                               origins=[0.0, -2.0]))


def test_streams_are_reproducible():
    a = RngState(5, 3).generator(0, 1, 7).standard_normal(4)
    b = RngState(5, 3).generator(0, 1, 7).standard_normal(4)
    assert np.array_equal(a, b)


def test_counters_and_streams_are_independent():
    base = RngState(5, 3).generator(0, 1, 7).standard_normal(4)
    other_step = RngState(5, 3).generator(0, 1, 8).standard_normal(4)
    other_stream = RngState(5, 4).generator(0, 1, 7).standard_normal(4)
    assert not np.allclose(base, other_step)
    assert not np.allclose(base, other_stream)


def test_unknown_algorithm():
    with pytest.raises(ConfigurationError):
        RngState(1, algorithm="mt").generator(0)


def test_noise_spec_rejects_negative_counts():
    with pytest.raises(ConfigurationError):
        NoiseSpec(noises=-1)


def test_gaussian_noise_variance(line):
    spec = NoiseSpec(noises=1)
    dt = 0.01
    w = propagation_noise(line, spec, dt, RngState(11).generator(0), 40000)
    assert w.shape == (1, 40000)
    assert np.var(w) == pytest.approx(1 / dt, rel=0.05)


def test_noise_variance_scales_with_cell_volume(plane):
    spec = NoiseSpec(noises=1)
    w = propagation_noise(plane, spec, 1.0, RngState(2).generator(0), 5000)
    assert w.shape == (1, 8, 5000)
    assert np.var(w) == pytest.approx(1 / plane.dV, rel=0.05)


def test_uniform_rows_follow_gaussian_rows(line):
    spec = NoiseSpec(noises=2, unoises=1)
    dt = 0.5
    w = propagation_noise(line, spec, dt, RngState(4).generator(0), 2000)
    assert w.shape == (3, 2000)
    assert np.all((w[2] >= 0) & (w[2] <= 1 / dt))
    assert np.min(w[:2]) < 0


def test_noise_needs_positive_step(line):
    with pytest.raises(ConfigurationError):
        propagation_noise(line, NoiseSpec(noises=1), 0.0, RngState(1).generator(0), 4)


def test_initial_randoms_layout(plane):
    spec = NoiseSpec(inrandoms=1, krandoms=1, urandoms=1)
    v = initial_randoms(plane, spec, RngState(9).generator(0), 50)
    assert v.shape == (3, 8, 50)
    assert np.all((np.real(v[2]) >= 0) & (np.real(v[2]) <= 1))


def test_momentum_filter_is_applied(plane):
    spec = NoiseSpec(knoises=1, nfilter=lambda w, p: 0 * w)
    w = propagation_noise(plane, spec, 1.0, RngState(3).generator(0), 4)
    assert np.allclose(w, 0)


def test_bad_filter_shape(plane):
    spec = NoiseSpec(knoises=1, nfilter=lambda w, p: np.ones((3, 3)))
    with pytest.raises(NoiseGenerationError):
        propagation_noise(plane, spec, 1.0, RngState(3).generator(0), 4)


def test_coarsen_gaussian_and_uniform():
    a = np.array([[1.0, 3.0]])
    b = np.array([[3.0, -1.0]])
    assert np.array_equal(coarsen_gaussian(a, b), [[2.0, 1.0]])
    assert np.array_equal(coarsen_uniform(a, b), [[1.0, -1.0]])


def test_coarsen_noise_by_row_kind():
    spec = NoiseSpec(noises=1, unoises=1)
    fine_a = np.array([[2.0], [0.4]])
    fine_b = np.array([[4.0], [0.9]])
    assert np.array_equal(coarsen_noise(fine_a, fine_b, spec), [[3.0], [0.4]])


def test_coarse_noise_has_coarse_variance(line):
    spec = NoiseSpec(noises=1)
    dt = 0.02
    fine_a = propagation_noise(line, spec, dt / 2, RngState(1).generator(1, 0), 40000)
    fine_b = propagation_noise(line, spec, dt / 2, RngState(1).generator(1, 1), 40000)
    coarse = coarsen_noise(fine_a, fine_b, spec)
    assert np.var(coarse) == pytest.approx(1 / dt, rel=0.05)


def test_coarsen_shape_mismatch():
    with pytest.raises(ShapeError):
        coarsen_gaussian(np.zeros((1, 2)), np.zeros((1, 3)))
