#!/usr/bin/env python3
"""Tests for the space-time lattice and momentum grids."""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add the project directory to the path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from stochastica.config import GridSpec, build_config  # noqa: E402
from stochastica.exceptions import ConfigurationError  # noqa: E402
from stochastica.lattice import (  # noqa: E402
    build_grid,
    centered_shift,
    fft_wavenumbers,
    momentum_axis,
    to_centered,
)


@pytest.fixture
def grid():
    return build_grid(GridSpec(dimensions=2, points=[11, 5], ranges=[1.0, 4.0],
                               origins=[0.0, -2.0], steps=2))


def test_step_sizes(grid):
    assert np.allclose(grid.dx, [0.1, 1.0])
    assert grid.dt == pytest.approx(0.1)
    assert grid.dtr == pytest.approx(0.05)
    assert grid.dV == pytest.approx(1.0)
    assert grid.nspace == 5


def test_axes_end_exactly_at_origin_plus_range(grid):
    assert np.array_equal(grid.r[1], [-2.0, -1.0, 0.0, 1.0, 2.0])
    assert grid.r[0][-1] == 1.0
    assert grid.times[0] == 0.0


def test_momentum_spacing(grid):
    assert grid.dk_periodic[1] == pytest.approx(2 * math.pi / 5)
    assert grid.dk_trig[1] == pytest.approx(math.pi / 4)
    assert grid.dkV == pytest.approx(2 * math.pi / 5)


def test_field_shape_and_axis_view(grid):
    assert grid.field_shape(3, 7) == (3, 5, 7)
    assert grid.axis_view(2, grid.r[1]).shape == (1, 5, 1)
    assert grid.axis_view(2, grid.r[1], trailing=0).shape == (1, 5)


def test_arrays_are_read_only(grid):
    with pytest.raises(ValueError):
        grid.dx[0] = 1.0


def test_default_grid_from_config():
    spec = build_config(dimensions=3).grid_spec()
    assert spec.points == [51, 35, 35]
    assert spec.ranges == [10.0, 10.0, 10.0]
    assert spec.origins == [0.0, -5.0, -5.0]


def test_time_origin_carries_over_when_origins_unset():
    spec = build_config().grid_spec(time_origin=4.0)
    assert spec.origins == [4.0]
    fixed = build_config(origins=[1.0]).grid_spec(time_origin=4.0)
    assert fixed.origins == [1.0]


def test_grid_spec_rejects_mismatched_lengths():
    with pytest.raises(ValueError):
        GridSpec(dimensions=2, points=[10], ranges=[1.0, 1.0], origins=[0.0, 0.0])


@pytest.mark.parametrize("n,expected", [(5, [0, 1, 2, -2, -1]), (4, [0, 1, 2, -1])])
def test_fft_wavenumbers(n, expected):
    assert np.array_equal(fft_wavenumbers(n, 1.0), expected)


def test_centered_order_is_ascending():
    for n in (4, 5, 8, 9):
        k = to_centered(fft_wavenumbers(n, 1.0), 0)
        assert np.all(np.diff(k) > 0)
        assert k[centered_shift(n)] == 0


def test_momentum_axis_conventions(grid):
    assert np.allclose(momentum_axis(grid, 2, "graphics-centered"),
                       np.array([-2, -1, 0, 1, 2]) * 2 * math.pi / 5)
    dst1 = momentum_axis(grid, 2, "trig", "DST1")
    dst3 = momentum_axis(grid, 2, "trig", "DST3")
    assert np.allclose(dst1, np.arange(5) * math.pi / 4)
    assert np.allclose(dst3 - dst1, math.pi / 8)


def test_momentum_axis_errors(grid):
    with pytest.raises(ConfigurationError):
        momentum_axis(grid, 3)
    with pytest.raises(ConfigurationError):
        momentum_axis(grid, 2, "sideways")
    with pytest.raises(ConfigurationError):
        momentum_axis(grid, 2, "trig", "DST9")
