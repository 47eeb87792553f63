#!/usr/bin/env python3
"""Tests for the result file format and plot-data extraction."""

import sys
from pathlib import Path

import numpy as np
import pytest

# Add the project directory to the path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from stochastica.config import build_config  # noqa: E402
from stochastica.engine import simulate  # noqa: E402
from stochastica.error_estimates import NPLANES, ErrorPlanes  # noqa: E402
from stochastica.exceptions import (  # noqa: E402
    ChecksumError,
    ConfigurationError,
    ResultFileError,
)
from stochastica.models import wiener  # noqa: E402
from stochastica.results_file import (  # noqa: E402
    MAGIC,
    default_axis_specs,
    parse_axis_spec,
    plot_table,
    read_results,
    write_results,
)


@pytest.fixture(scope="module")
def results():
    cfg = build_config(
        name="Two-member diffusion",
        dimensions=2,
        points=[6, 8],
        ranges=[1.0, 4.0],
        ensembles=[4, 2],
        rawdata=True,
        deriv=lambda a, w, p: w,
        observe=[lambda a, p: a**2, lambda a, p: p.xint(a)],
        compare=[lambda p: p.t / p.dV, None],
        constants={"LABEL": 3},
    )
    return simulate(cfg)[1]


def test_round_trip(tmp_path, results):
    path = write_results(tmp_path / "run.dat", results)
    loaded = read_results(path)
    assert len(loaded.data) == 1
    for n in (1, 2):
        original, copy = results.graph(n), loaded.graph(n)
        assert np.array_equal(original.values, copy.values)
        assert original.available == copy.available
        assert original.axis_names == copy.axis_names
        for a, b in zip(original.axes, copy.axes):
            assert np.array_equal(a, b)
    assert loaded.grids[0].points == results.grids[0].points
    assert loaded.configs[0]["name"] == "Two-member diffusion"
    assert loaded.configs[0]["method"] == "MP"
    assert sorted(loaded.raw) == sorted(results.raw)
    assert loaded.error.scores() == pytest.approx(results.error.scores())
    assert loaded.error.elapsed == 0.0
    chi2 = results.graph(1).chi2
    assert loaded.graph(1).chi2.k == chi2.k


def test_same_data_gives_same_bytes(tmp_path, results):
    first = write_results(tmp_path / "a.dat", results).read_bytes()
    second = write_results(tmp_path / "b.dat", results).read_bytes()
    assert first == second
    assert first.startswith(MAGIC + b"\n")


def test_file_does_not_depend_on_lanes_or_run_time(tmp_path):
    cfg = wiener()[0].with_overrides({"ensembles": [20, 2, 3]})
    _, serial = simulate(cfg, max_workers=1)
    _, parallel = simulate(cfg, max_workers=3)
    # wall-clock time always differs between runs
    serial.error.elapsed, parallel.error.elapsed = 1.5, 40.0
    first = write_results(tmp_path / "one.dat", serial).read_bytes()
    second = write_results(tmp_path / "three.dat", parallel).read_bytes()
    assert first == second


def test_corrupted_payload_fails_checksum(tmp_path, results):
    path = write_results(tmp_path / "run.dat", results)
    data = bytearray(path.read_bytes())
    data[-1] ^= 0xFF
    path.write_bytes(bytes(data))
    with pytest.raises(ChecksumError):
        read_results(path)


def test_foreign_file_is_rejected(tmp_path):
    path = tmp_path / "other.dat"
    path.write_bytes(b"not a result file\n")
    with pytest.raises(ResultFileError):
        read_results(path)


def test_unsupported_version(tmp_path, results):
    path = write_results(tmp_path / "run.dat", results)
    data = path.read_bytes().replace(b"version 1\n", b"version 9\n", 1)
    path.write_bytes(data)
    with pytest.raises(ResultFileError):
        read_results(path)


def test_missing_file(tmp_path):
    with pytest.raises(ResultFileError):
        read_results(tmp_path / "missing.dat")


def test_graph_lookup_errors(results):
    with pytest.raises(ConfigurationError):
        results.graph(3)
    with pytest.raises(ConfigurationError):
        results.graph(1, sequence=2)


@pytest.mark.parametrize("spec,expected", [
    ("0", [0, 1, 2, 3, 4]),
    ("-1", [2]),
    ("-2", [4]),
    ("2", [1]),
    ("2:4", [1, 2, 3]),
    ("1:5:2", [0, 2, 4]),
])
def test_parse_axis_spec(spec, expected):
    assert parse_axis_spec(spec, 5).tolist() == expected


@pytest.mark.parametrize("spec", ["9", "-3", "abc", "4:2"])
def test_parse_axis_spec_errors(spec):
    with pytest.raises(ConfigurationError):
        parse_axis_spec(spec, 5)


def _planes():
    values = np.zeros((1, 3, 4, NPLANES))
    values[..., 0] = np.arange(12.0).reshape(3, 4)
    values[..., 2] = 0.1
    available = (True, False, True, False, False, False)
    axes = [np.array([0.0, 0.5, 1.0]), np.array([-1.5, -0.5, 0.5, 1.5])]
    return ErrorPlanes(values, available, axes=axes, axis_names=["t", "x"])


def test_plot_table_defaults_to_space_midpoint():
    planes = _planes()
    assert default_axis_specs(planes) == ["0", "-1"]
    columns, rows = plot_table(planes)
    assert columns == ["t", "x", "mean_1", "sampling_1"]
    assert rows.shape == (3, 4)
    assert np.allclose(rows[:, 1], 0.5)
    assert np.allclose(rows[:, 2], [2.0, 6.0, 10.0])


def test_plot_table_with_explicit_axes():
    columns, rows = plot_table(_planes(), ["-2", "0"])
    assert rows.shape == (4, 4)
    assert np.allclose(rows[:, 0], 1.0)
    assert np.allclose(rows[:, 2], [8.0, 9.0, 10.0, 11.0])


def test_plot_table_needs_one_spec_per_axis():
    with pytest.raises(ConfigurationError):
        plot_table(_planes(), ["0"])
