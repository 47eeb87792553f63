#!/usr/bin/env python3
"""Tests for extrapolation, sampling statistics and goodness-of-fit sums."""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add the project directory to the path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from stochastica.error_estimates import (  # noqa: E402
    NPLANES,
    ErrorPlanes,
    FitStatistic,
    chi_squared,
    epsilon,
    extrapolate,
    g_squared,
    sampling_stats,
    summarize,
)
from stochastica.exceptions import ConfigurationError, ShapeError  # noqa: E402


@pytest.mark.parametrize("order,expected", [(0, 0.0), (1, 1.0), (2, 1 / 3), (4, 1 / 15)])
def test_epsilon(order, expected):
    assert epsilon(order) == pytest.approx(expected)


def test_epsilon_rejects_negative_order():
    with pytest.raises(ConfigurationError):
        epsilon(-1)


def test_extrapolate_second_order():
    value, error = extrapolate(np.array([1.0]), np.array([0.97]), 2)
    assert value[0] == pytest.approx(1.01)
    assert error[0] == pytest.approx(0.01)


def test_extrapolate_order_zero_keeps_fine_result():
    value, error = extrapolate(np.array([2.0, 3.0]), np.array([1.5, 3.5]), 0)
    assert np.array_equal(value, [2.0, 3.0])
    assert np.allclose(error, [0.5, 0.5])


def test_extrapolate_removes_leading_error_term():
    # f(h) = 1 + h^2 sampled at h and h/2
    h = 0.1
    value, _ = extrapolate(1 + (h / 2) ** 2, 1 + h**2, 2)
    assert float(value) == pytest.approx(1.0, abs=1e-14)


def test_extrapolate_shape_mismatch():
    with pytest.raises(ShapeError):
        extrapolate(np.zeros(3), np.zeros(4), 1)


def test_sampling_stats_single_member_has_no_error():
    mean, sigma = sampling_stats([np.array([1.0, 2.0])])
    assert np.array_equal(mean, [1.0, 2.0])
    assert sigma is None


def test_sampling_stats_standard_error():
    means = [np.array([1.0]), np.array([2.0]), np.array([3.0]), np.array([4.0])]
    mean, sigma = sampling_stats(means)
    assert mean[0] == pytest.approx(2.5)
    expected = np.std([1, 2, 3, 4], ddof=1) / math.sqrt(4)
    assert sigma[0] == pytest.approx(expected)


def test_sampling_stats_needs_data():
    with pytest.raises(ConfigurationError):
        sampling_stats([])


class TestChiSquared:
    def test_variance_mode(self):
        stat = chi_squared([1.0, 2.0], [0.5, 0.5], [1.5, 2.0])
        assert stat.value == pytest.approx(1.0)
        assert stat.k == 2
        assert stat.per_point == pytest.approx(0.5)

    def test_comparison_error_adds_in_quadrature(self):
        stat = chi_squared([1.0], [0.3], [2.0], comp_sigma=[0.4])
        assert stat.value == pytest.approx(1.0 / 0.25)

    def test_points_below_cutoff_are_skipped(self):
        stat = chi_squared([0.0, 1.0], [1.0, 1.0], [0.5, 1.0], cutoff=1e-6)
        assert stat.k == 1

    def test_zero_variance_points_are_excluded(self):
        stat = chi_squared([1.0, 1.0], [0.0, 1.0], [2.0, 2.0])
        assert stat.k == 1
        assert stat.excluded == 1

    def test_count_mode(self):
        # scale * value * volume gives counts 100 and 20 against 110 and 5
        stat = chi_squared([1.0, 0.2], None, [1.1, 0.05], scale=100.0, mincount=10)
        assert stat.k == 1
        assert stat.value == pytest.approx(100 / 110)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            chi_squared([1.0, 2.0], [1.0, 1.0], [1.0])


def test_g_squared_vanishes_for_exact_counts():
    stat = g_squared([50, 100, 50], [50, 100, 50])
    assert stat.value == pytest.approx(0.0, abs=1e-12)
    assert stat.k == 3


def test_g_squared_ignores_sparse_bins():
    stat = g_squared([50, 2, 60], [55, 3, 55], mincount=10)
    assert stat.k == 2
    assert stat.value > 0


def test_g_squared_with_no_usable_bins():
    assert g_squared([1, 2], [1, 2], mincount=10) == FitStatistic(0.0, 0)


def _planes(mean, step=None, sampling=None, compare=None):
    values = np.zeros(np.shape(mean) + (NPLANES,))
    values[..., 0] = mean
    available = [True, step is not None, sampling is not None,
                 compare is not None, False, False]
    for c, plane in ((1, step), (2, sampling), (3, compare)):
        if plane is not None:
            values[..., c] = plane
    return ErrorPlanes(values, tuple(available))


def test_summarize_relative_rms():
    graph = _planes(np.array([[2.0, 4.0]]), step=np.array([[0.04, 0.04]]),
                    sampling=np.array([[0.08, 0.08]]), compare=np.array([[2.0, 3.6]]))
    vector = summarize([graph])
    assert vector.step == pytest.approx(0.01)
    assert vector.sampling == pytest.approx(0.02)
    assert vector.comparison == pytest.approx(math.sqrt(0.16 / 2) / 3.6)
    assert vector.total == pytest.approx(
        math.sqrt((vector.step**2 + vector.sampling**2 + vector.comparison**2) / 3)
    )
    assert vector.report[0]["graph"] == 1


def test_summarize_absolute_maximum():
    graph = _planes(np.array([[2.0, 4.0]]), step=np.array([[0.1, 0.3]]))
    vector = summarize([graph], relerr=False, rmserr=False)
    assert vector.step == pytest.approx(0.3)
    assert vector.sampling == 0.0


def test_summarize_without_comparison_totals():
    graph = _planes(np.array([[2.0, 4.0]]), compare=np.array([[2.0, 3.6]]))
    vector = summarize([graph], diff=False)
    assert vector.comparison == 0.0
    assert vector.total == 0.0
    assert vector.report[0]["diff"] > 0


def test_summarize_skips_missing_graphs():
    graph = _planes(np.array([[1.0]]), step=np.array([[0.5]]))
    vector = summarize([None, graph])
    assert [entry["graph"] for entry in vector.report] == [2]
    assert len(vector.as_list()) == 6


def test_error_planes_hide_unavailable_planes():
    graph = _planes(np.ones((1, 3)), sampling=np.full((1, 3), 0.1))
    assert graph.plane(1) is None
    assert np.allclose(graph.plane(2), 0.1)
    assert graph.mean.shape == (1, 3)
