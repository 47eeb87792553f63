#!/usr/bin/env python3
"""Tests for the simulation driver: passes, ensembles, sequences and scans."""

import math
import sys
from pathlib import Path

import numpy as np
import pytest

# Add the project directory to the path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from stochastica.config import build_config  # noqa: E402
from stochastica.engine import (  # noqa: E402
    Trajectory,
    prepare,
    scan_parameter,
    simulate,
)
from stochastica.error_estimates import xcheck  # noqa: E402
from stochastica.exceptions import (  # noqa: E402
    ConfigurationError,
    DivergenceError,
    ShapeError,
)
from stochastica.models import gain, heat_boundaries, wiener  # noqa: E402


def decay_config(**changes):
    settings = dict(
        name="Decay",
        noises=0,
        points=[11],
        ranges=[1.0],
        initial=lambda v, p: 1.0,
        deriv=lambda a, w, p: -p.K * a,
        observe=lambda a, p: a,
        compare=lambda p: np.exp(-p.K * p.t),
        constants={"K": 1.0},
    )
    settings.update(changes)
    return build_config(**settings)


def test_deterministic_decay_is_accurate():
    vector, results = simulate(decay_config())
    planes = results.graph(1)
    assert planes.values.shape == (1, 11, 6)
    assert planes.available[:4] == (True, True, False, True)
    assert np.max(np.abs(planes.mean - planes.plane(3))) < 1e-7
    assert 0 < np.max(planes.plane(1)) < 1e-5
    assert vector.comparison < 1e-7
    assert planes.axis_names == ["t"]
    assert np.allclose(planes.axes[0], np.linspace(0, 1, 11))


def test_single_pass_has_no_step_error():
    _, results = simulate(decay_config(checks=0, method="Euler"))
    assert not results.graph(1).available[1]


def test_output_only_graph():
    cfg = decay_config(
        observe=[lambda a, p: a, None],
        output=[None, lambda o, p: 2 * o[0]],
        compare=[None, lambda p: 2 * np.exp(-p.t)],
    )
    _, results = simulate(cfg)
    graph = results.graph(2)
    assert np.allclose(graph.mean, 2 * np.exp(-np.linspace(0, 1, 11)), atol=1e-6)


def test_averages_select_graphs():
    cfg = decay_config(observe=[lambda a, p: a, lambda a, p: a**2], averages=[2])
    _, results = simulate(cfg)
    with pytest.raises(ConfigurationError):
        results.graph(1)
    assert results.graph(2).mean[0, -1] == pytest.approx(math.exp(-2), abs=1e-6)


def test_heat_equation_boundaries_are_exact():
    _, results = simulate(heat_boundaries())
    for n in range(1, 6):
        graph = results.graph(n)
        assert graph.axis_names == ["t", "x"]
        assert np.max(np.abs(graph.mean - graph.plane(3))) < 1e-10


def test_coarse_noise_is_built_from_fine_noise():
    sim = prepare(build_config(noises=2, ensembles=[5], points=[6]))
    coarse = Trajectory(sim, 3, 0)
    fine = Trajectory(sim, 3, 1)
    for n in range(4):
        expected = (fine.noise(2 * n) + fine.noise(2 * n + 1)) / 2
        assert np.allclose(coarse.noise(n), expected)
    assert fine.dtr == pytest.approx(coarse.dtr / 2)


def test_results_do_not_depend_on_lanes():
    cfg = wiener()[0].with_overrides({"ensembles": [20, 2, 3]})
    _, one = simulate(cfg, max_workers=1)
    _, many = simulate(cfg, max_workers=3)
    for n in (1, 2):
        assert np.array_equal(one.graph(n).values, many.graph(n).values)


def test_results_do_not_depend_on_serial_parallel_split():
    base = wiener()[0]
    _, serial = simulate(base.with_overrides({"ensembles": [20, 6, 1]}))
    _, parallel = simulate(base.with_overrides({"ensembles": [20, 1, 6]}))
    assert np.array_equal(serial.graph(2).values, parallel.graph(2).values)


def test_seed_changes_the_noise():
    base = wiener()[0].with_overrides({"ensembles": [10, 2]})
    _, first = simulate(base)
    _, again = simulate(base)
    _, other = simulate(base.with_overrides({"seed": 5}))
    assert np.array_equal(first.graph(2).mean, again.graph(2).mean)
    assert not np.allclose(first.graph(2).mean, other.graph(2).mean)


def test_seed_from_environment(monkeypatch):
    monkeypatch.setenv("STOCHASTICA_SEED", "7")
    assert prepare(build_config()).seed == 7
    assert prepare(build_config(seed=3)).seed == 3


def test_sampling_error_needs_several_members():
    _, results = simulate(wiener()[0].with_overrides({"ensembles": [50, 4]}))
    graph = results.graph(2)
    assert graph.available[2]
    assert np.all(graph.plane(2)[0, 1:] > 0)
    assert graph.chi2 is not None and graph.chi2.k > 0


def test_sequence_continues_in_time():
    configs = [c.with_overrides({"ensembles": [50, 1, 2]}) for c in gain()]
    vector, results = simulate(configs)
    assert len(results.data) == 2
    assert results.grids[1].origins[0] == pytest.approx(4.0)
    assert results.graph(1, sequence=2).axes[0][-1] == pytest.approx(8.0)
    assert vector.elapsed >= 0


def test_sequence_cannot_change_ensemble_without_transfer():
    first, second = gain()
    configs = [first.with_overrides({"ensembles": [50, 1, 2]}),
               second.with_overrides({"ensembles": [40, 1, 2]})]
    with pytest.raises(ConfigurationError):
        simulate(configs)


def test_sequence_cannot_change_outer_ensembles():
    first, second = gain()
    configs = [first.with_overrides({"ensembles": [50, 1, 2]}),
               second.with_overrides({"ensembles": [50, 2, 2]})]
    with pytest.raises(ConfigurationError):
        simulate(configs)


def test_raw_fields_are_kept_on_request():
    cfg = decay_config(rawdata=True, ensembles=[3, 2])
    _, results = simulate(cfg)
    assert sorted(results.raw) == [(0, 0, 0), (0, 0, 1), (0, 1, 0), (0, 1, 1)]
    assert results.raw[(0, 1, 0)][0].shape == (1, 3)


def test_binned_graph_layout():
    cfg = build_config(
        noises=1,
        points=[4],
        ranges=[0.5],
        ensembles=[500, 2],
        deriv=lambda a, w, p: w,
        observe=lambda a, p: a,
        binranges=[[np.linspace(-4.0, 4.0, 17).tolist()]],
        compare=lambda p: np.exp(-(p.o[0] ** 2) / (2 * (p.t + 1e-3)))
        / np.sqrt(2 * math.pi * (p.t + 1e-3)),
    )
    _, results = simulate(cfg)
    graph = results.graph(1)
    assert graph.values.shape == (1, 4, 16, 6)
    assert graph.axis_names == ["t", "bin1"]
    assert np.allclose(graph.mean.sum(axis=-1) * 0.5, 1.0, atol=0.02)


def test_weighted_simulation_records_breeding():
    cfg = build_config(
        fields=[2],
        points=[4],
        ensembles=[200, 2],
        thresholdw=0.5,
        initial=lambda v, p: np.concatenate([1 + v[0:1], 0 * v[1:2]]),
        deriv=lambda a, w, p: -a + w[:2],
        observe=[lambda a, p: a[0:1], lambda a, p: p.breedw],
    )
    _, results = simulate(cfg)
    breeds = results.graph(2).mean
    assert np.all((breeds >= 0) & (breeds <= 1))
    assert np.any(breeds[0, 1:] > 0)


def test_divergence_reports_sequence():
    cfg = decay_config(deriv=lambda a, w, p: a**3, compare=None)
    with np.errstate(all="ignore"):
        with pytest.raises(DivergenceError) as info:
            simulate(cfg.with_overrides({"ranges": [10.0], "points": [51]}))
    assert info.value.sequence == 1


def test_observe_shape_is_checked():
    cfg = decay_config(observe=lambda a, p: np.ones((2, 3, 4)))
    with pytest.raises(ShapeError):
        simulate(cfg)


def test_projected_method_needs_manifold():
    with pytest.raises(ConfigurationError):
        prepare(build_config(method="MPnproj"))


def test_scatter_count_is_limited():
    with pytest.raises(ConfigurationError):
        prepare(decay_config(scatters=[5], ensembles=[2]))


def test_scan_parameter():
    table = scan_parameter(decay_config(), "K", [1.0, 2.0],
                           compare=lambda k: math.exp(-k))
    assert np.allclose(table.mean, [math.exp(-1), math.exp(-2)], atol=1e-6)
    assert np.allclose(table.comparison, table.mean, atol=1e-6)
    assert [row["value"] for row in table.rows] == [1.0, 2.0]


def test_scan_needs_values():
    with pytest.raises(ConfigurationError):
        scan_parameter(decay_config(), "K", [])


def test_xcheck_convergence():
    table = xcheck(3, decay_config(method="Euler", checks=0))
    assert [level.steps for level in table.levels] == [1, 2, 4]
    assert table.monotone
    first, last = table.levels[0].difference, table.levels[-1].difference
    assert last < first / 3


def test_xcheck_needs_comparisons():
    with pytest.raises(ConfigurationError):
        xcheck(2, decay_config(compare=None))
    with pytest.raises(ConfigurationError):
        xcheck(0, decay_config())


@pytest.mark.slow
def test_wiener_statistics():
    vector, results = simulate(wiener())
    assert vector.comparison < 0.05
    graph = results.graph(2)
    assert graph.mean[0, -1] == pytest.approx(10.0, rel=0.05)
