"""Simulation driver: sequences, ensemble hierarchy and check passes.

A run is a sequence of SimConfigs. For each one, every high-level
ensemble member (serial x parallel) integrates a vector ensemble of
trajectories once per check pass: a coarse pass with step dt/steps and,
when checks are on, a fine pass with half that step whose noises are the
ones the coarse pass is built from. Observables are averaged per member,
combined across members into means and sampling errors, extrapolated
across passes and compared against analytic results.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from shared.utils import Timer

from .advanced import (
    Manifold,
    WeightState,
    breed,
    step_projected,
    trajectory_weights,
)
from .config import SimConfig, get_settings
from .error_estimates import (
    NPLANES,
    ErrorPlanes,
    ErrorVector,
    chi_squared,
    extrapolate,
    sampling_stats,
    summarize,
)
from .exceptions import (
    ConfigurationError,
    DivergenceError,
    ShapeError,
    UnsupportedOperationError,
)
from .findiff import BoundaryEvaluator
from .lattice import Grid, build_grid, fft_wavenumbers, momentum_axis, to_centered
from .observables import ObserveSpec, bin_centers, bin_edges, evaluate_observables
from .params import Params
from .randoms import (
    INITIAL_COUNTER,
    NoiseSpec,
    RngState,
    coarsen_noise,
    initial_randoms,
    propagation_noise,
)
from .results_file import ResultData, write_results
from .spectral import (
    Propagator,
    build_propagator,
    impose_dirichlet,
    propagate_ip,
    temporal_transform,
)
from .stepper import (
    FieldSet,
    MethodInfo,
    StepContext,
    ito_stratonovich_drift_shift,
    method_info,
    step,
)

logger = logging.getLogger(__name__)

Sequenceable = Union[SimConfig, Sequence[SimConfig]]


@dataclass
class Simulation:
    """One configuration with everything derived from it."""

    index: int
    cfg: SimConfig
    grid: Grid
    method: MethodInfo
    noise: NoiseSpec
    specs: List[Optional[ObserveSpec]]
    seed: int
    order: int
    passes: int
    manifold: Optional[Manifold] = None

    @property
    def temporal(self) -> bool:
        return any(s is not None and s.temporal for s in self.specs)

    def dtr(self, pass_index: int) -> float:
        return self.grid.dtr / (2 if pass_index == 1 else 1)

    def substeps(self, pass_index: int) -> int:
        return self.grid.steps * (2 if pass_index == 1 else 1)


@dataclass
class MemberResult:
    """Per-pass vector-ensemble averages and final fields of one member."""

    member: int
    observed: List[List[Optional[np.ndarray]]]
    final: List[FieldSet]
    breedw: float = 0.0


def _fit(value: Any, shape: Tuple[int, ...], what: str) -> np.ndarray:
    arr = np.asarray(value, dtype=complex)
    if arr.ndim == len(shape) - 1 and shape[0] == 1:
        arr = arr[np.newaxis]
    try:
        return np.array(np.broadcast_to(arr, shape), dtype=complex)
    except ValueError as e:
        raise ShapeError(
            f"{what} returned shape {arr.shape}, expected {shape}"
        ) from e


def prepare(cfg: SimConfig, index: int = 0, time_origin: Optional[float] = None
            ) -> Simulation:
    """Resolve defaults and build the grid, noise and observable specs."""
    grid = build_grid(cfg.grid_spec(time_origin))
    method = method_info(cfg.method_name)
    noise = NoiseSpec(
        noises=cfg.noise_count,
        knoises=cfg.knoises,
        unoises=cfg.unoises,
        inrandoms=cfg.inrandom_count,
        krandoms=cfg.krandom_count,
        urandoms=cfg.urandoms,
        nfilter=cfg.nfilter,
        rfilter=cfg.rfilter,
    )
    computed = set(cfg.computed_graphs())
    specs: List[Optional[ObserveSpec]] = []
    for n in range(cfg.graphs):
        if n not in computed:
            specs.append(None)
            continue
        specs.append(ObserveSpec(
            observe=cfg.graph_item(cfg.observe, n),
            transforms=list(cfg.graph_item(cfg.transforms, n, [])),
            binranges=cfg.graph_item(cfg.binranges, n),
            scatters=cfg.graph_item(cfg.scatters, n, 0),
            output=cfg.graph_item(cfg.output, n),
            compare=cfg.graph_item(cfg.compare, n),
        ))
    for n, spec in enumerate(specs):
        if spec is not None and spec.scatters > cfg.ensembles[0]:
            raise ConfigurationError(
                "Cannot scatter more trajectories than the vector ensemble holds",
                {"graph": n + 1},
            )
    manifold = None
    if method.projected:
        if cfg.manifold is None:
            raise ConfigurationError(f"Method {method.name} needs a manifold")
        if any(f is not None for f in cfg.linear):
            raise UnsupportedOperationError(
                "Projected methods do not support a linear operator"
            )
        manifold = Manifold.from_config(cfg.manifold, cfg.qcproj, cfg.vcproj,
                                        cfg.vcpower)
    seed = cfg.seed
    settings = get_settings()
    if "seed" not in cfg.model_fields_set and settings.seed_override is not None:
        seed = settings.seed_override
    order = method.order if cfg.order == -1 else cfg.order
    return Simulation(index, cfg, grid, method, noise, specs, seed, order,
                      2 if cfg.checks else 1, manifold)


class Trajectory:
    """Integrates one vector ensemble through one pass of a Simulation."""

    def __init__(self, sim: Simulation, member: int, pass_index: int):
        self.sim = sim
        self.cfg = sim.cfg
        self.grid = sim.grid
        self.member = member
        self.pass_index = pass_index
        self.ensemble = sim.cfg.ensembles[0]
        self.rng = RngState(sim.seed, member)
        self.params = Params(sim.cfg, sim.grid)
        self.boundaries = BoundaryEvaluator(sim.cfg, sim.grid, self.params)
        self.dtr = sim.dtr(pass_index)
        self.params.dtr = self.dtr
        self.pairs = [
            [
                [tuple(sim.cfg.boundary_matrix(c, dim)[i])
                 for dim in range(2, sim.grid.dimensions + 1)]
                for i in range(nf)
            ]
            for c, nf in enumerate(sim.cfg.fields)
        ]
        self.nonperiodic = any(
            p != (0, 0) for cell in self.pairs for row in cell for p in row
        )
        self.dirichlet = any(
            1 in p for cell in self.pairs for row in cell for p in row
        )
        ipsteps = sim.cfg.ipsteps or sim.method.ipsteps
        self.dt_ip = self.dtr / ipsteps
        self.propagators: List[Propagator] = [
            build_propagator(sim.grid, sim.cfg.graph_item(sim.cfg.linear, c),
                             self.params, self.pairs[c], self.dt_ip)
            for c in range(sim.cfg.cells)
        ]
        self._pending: Optional[Tuple[FieldSet, FieldSet, np.ndarray]] = None
        self.weights: Optional[WeightState] = (
            WeightState(sim.cfg.thresholdw) if sim.cfg.weighted else None
        )

    # Noise

    def _generator(self, *counter: int) -> np.random.Generator:
        return self.rng.generator(self.sim.index, *counter)

    def _fine_noise(self, n: int) -> np.ndarray:
        return propagation_noise(self.grid, self.sim.noise, self.grid.dtr / 2,
                                 self._generator(1, n), self.ensemble, self.params)

    def noise(self, n: int) -> np.ndarray:
        """Noise of computational step n of this pass."""
        if self.sim.noise.total == 0:
            return np.zeros(self.grid.field_shape(0, self.ensemble))
        if self.sim.passes == 1:
            return propagation_noise(self.grid, self.sim.noise, self.dtr,
                                     self._generator(0, n), self.ensemble,
                                     self.params)
        if self.pass_index == 1:
            return self._fine_noise(n)
        return coarsen_noise(self._fine_noise(2 * n), self._fine_noise(2 * n + 1),
                             self.sim.noise)

    def randoms(self) -> np.ndarray:
        return initial_randoms(self.grid, self.sim.noise,
                               self._generator(INITIAL_COUNTER), self.ensemble,
                               self.params)

    # Initial fields

    def initial_fields(
        self, v: np.ndarray, previous: Optional[FieldSet]
    ) -> FieldSet:
        cfg = self.cfg
        cells: FieldSet = []
        for c, nf in enumerate(cfg.fields):
            shape = self.grid.field_shape(nf, self.ensemble)
            transfer = cfg.graph_item(cfg.transfer, c)
            if previous is not None:
                if transfer is not None:
                    value = transfer(v, *previous, self.params)
                else:
                    if previous[c].shape[-1] != self.ensemble:
                        raise ConfigurationError(
                            "Vector ensemble changed in a sequence without a transfer",
                            {"sequence": self.sim.index + 1},
                        )
                    value = previous[c]
            else:
                initial = cfg.graph_item(cfg.initial, c)
                value = 0.0 if initial is None else initial(v, self.params)
            cells.append(_fit(value, shape, f"Initial value of cell {c + 1}"))
        return cells

    # Operators handed to the methods

    def propagate(self, a: FieldSet, t: float, lift: bool) -> FieldSet:
        out: FieldSet = []
        before = after = None
        if lift and self.nonperiodic:
            before = self.boundaries.evaluate(a, t)
            if self.dirichlet:
                after = self.boundaries.evaluate(a, t + self.dt_ip)
        for c, prop in enumerate(self.propagators):
            out.append(propagate_ip(
                a[c], prop, self.grid,
                None if before is None else before.cell(c),
                None if after is None else after.cell(c),
                lift,
            ))
        return out

    def deriv(self, a: FieldSet, w: np.ndarray, t: float) -> FieldSet:
        cfg = self.cfg
        p = self.params
        p.t = t
        if self.nonperiodic:
            p.boundary = self.boundaries.evaluate(a, t)
        if cfg.deriv_a is not None:
            drift = np.asarray(cfg.deriv_a(a[0], p), dtype=complex)
            out = drift
            if cfg.deriv_b is not None:
                b = np.asarray(cfg.deriv_b(a[0], p))
                rows = w[: b.shape[1]]
                out = drift + np.einsum("ij...,j...->i...", b, rows)
                if cfg.ito and self.sim.method.calculus == "Stratonovich":
                    out = out - ito_stratonovich_drift_shift(cfg.deriv_b, a[0], p)
            return [_fit(out, a[0].shape, "deriv_a")]
        result: FieldSet = []
        for c, cell in enumerate(a):
            fn = cfg.graph_item(cfg.deriv, c)
            if fn is None:
                result.append(np.zeros(cell.shape, dtype=complex))
            else:
                result.append(_fit(fn(*a, w, p), cell.shape, f"deriv of cell {c + 1}"))
        return result

    def define(self, a: FieldSet, w: np.ndarray, t: float) -> List[np.ndarray]:
        cfg = self.cfg
        if cfg.auxfields == 0 or cfg.define is None:
            return []
        self.params.t = t
        shape = self.grid.field_shape(cfg.auxfields, self.ensemble)
        return [_fit(cfg.define(*a, w, self.params), shape, "define")]

    def pin(self, a: FieldSet, t: float) -> None:
        if not self.dirichlet:
            return
        values = self.boundaries.evaluate(a, t)
        for c, cell in enumerate(a):
            impose_dirichlet(cell, self.pairs[c], values.cell(c))

    # Integration

    def _observe(
        self,
        cells: FieldSet,
        aux: List[np.ndarray],
        t: float,
        specs: List[Optional[ObserveSpec]],
        weighted: bool = True,
    ) -> List[Optional[np.ndarray]]:
        self.params.t = t
        weights = None
        if self.weights is not None:
            self.params.breedw = self.weights.breedw
            if weighted:
                weights = trajectory_weights(cells)
        return evaluate_observables(cells, aux, specs, self.grid, self.params, weights)

    def run(self, cells: FieldSet) -> Tuple[List[Optional[np.ndarray]], FieldSet]:
        sim = self.sim
        grid = self.grid
        points = grid.points[0]
        t0 = grid.origins[0]
        substeps = sim.substeps(self.pass_index)
        spatial_specs = [s if s is not None and not s.temporal else None
                         for s in sim.specs]
        temporal_specs = [s if s is not None and s.temporal else None
                          for s in sim.specs]
        need_average = sim.temporal or self.cfg.auxfields > 0
        zero_noise = np.zeros(grid.field_shape(sim.noise.total, self.ensemble))
        aux = self.define(cells, zero_noise, t0)
        series: List[List[Optional[np.ndarray]]] = [
            self._observe(cells, aux, t0, spatial_specs)
        ]
        samples: List[FieldSet] = []
        aux_samples: List[List[np.ndarray]] = []
        t = t0
        n = 0
        for j in range(1, points):
            for sub in range(substeps):
                w = self.noise(n)
                ctx = StepContext(t, self.dtr, self.propagate, self.deriv,
                                  self.cfg.iterations, self.cfg.adapt)
                start = cells
                if sim.manifold is not None:
                    cells = step_projected(sim.method.name, cells, w, ctx, sim.manifold)
                else:
                    cells = step(sim.method.name, cells, w, ctx)
                t = t0 + (n + 1) * self.dtr
                self.pin(cells, t)
                if need_average:
                    self._accumulate(start, cells, w, t, sub, samples, aux_samples)
                n += 1
            t = t0 + j * grid.dt
            if self.weights is not None:
                self.weights, cells = breed(self.weights, cells)
            if need_average and aux_samples:
                aux = aux_samples[-1]
            series.append(self._observe(cells, aux, t, spatial_specs))
        observed = self._stack(series)
        if sim.temporal:
            spectra = self._spectra(samples, aux_samples, temporal_specs)
            for idx, value in enumerate(spectra):
                if value is not None:
                    observed[idx] = value
        return observed, cells

    def _accumulate(
        self,
        start: FieldSet,
        end: FieldSet,
        w: np.ndarray,
        t: float,
        sub: int,
        samples: List[FieldSet],
        aux_samples: List[List[np.ndarray]],
    ) -> None:
        """Step-averaged fields (and auxiliary fields) per coarse interval."""
        if self.pass_index == 1:
            if sub % 2 == 0:
                self._pending = (start, end, w)
                return
            assert self._pending is not None
            first, mid, w_first = self._pending
            averaged = [(a + 2 * m + b) / 4 for a, m, b in zip(first, mid, end)]
            w = coarsen_noise(w_first, w, self.sim.noise)
            dtc = 2 * self.dtr
        else:
            averaged = [(a + b) / 2 for a, b in zip(start, end)]
            dtc = self.dtr
        if self.sim.temporal:
            samples.append(averaged)
        aux_samples.append(self.define(averaged, w, t - dtc / 2))
        if not self.sim.temporal and len(aux_samples) > 1:
            del aux_samples[0]

    def _stack(self, series: List[List[Optional[np.ndarray]]]
               ) -> List[Optional[np.ndarray]]:
        out: List[Optional[np.ndarray]] = []
        for idx in range(len(self.sim.specs)):
            values = [point[idx] for point in series]
            if values[0] is None:
                out.append(None)
            else:
                out.append(np.stack(values, axis=1))
        return out

    def _spectra(
        self,
        samples: List[FieldSet],
        aux_samples: List[List[np.ndarray]],
        specs: List[Optional[ObserveSpec]],
    ) -> List[Optional[np.ndarray]]:
        grid = self.grid
        points = grid.points[0]
        dtc = grid.dtr
        padded = points * grid.steps
        t_first = grid.origins[0] + dtc / 2
        transformed: List[np.ndarray] = []
        omega = np.zeros(points)
        ncells = len(samples[0])
        for c in range(ncells):
            stack = np.stack([s[c] for s in samples])
            omega, spec = temporal_transform(stack, dtc, t_first, points, padded)
            transformed.append(spec)
        aux_t: List[np.ndarray] = []
        if aux_samples and aux_samples[0]:
            stack = np.stack([s[0] for s in aux_samples])
            aux_t.append(temporal_transform(stack, dtc, t_first, points, padded)[1])
        series = []
        for i in range(points):
            self.params.w = omega[i]
            cells = [x[i] for x in transformed]
            aux = [x[i] for x in aux_t]
            series.append(self._observe(cells, aux, grid.origins[0], specs, False))
        return self._stack(series)


def _run_member(
    sim: Simulation, member: int, previous: Optional[List[FieldSet]]
) -> MemberResult:
    observed: List[List[Optional[np.ndarray]]] = []
    finals: List[FieldSet] = []
    breedw = 0.0
    for pass_index in range(sim.passes):
        traj = Trajectory(sim, member, pass_index)
        v = traj.randoms()
        traj.boundaries.initialize([v] * sim.cfg.cells)
        prior = None
        if previous is not None:
            prior = previous[pass_index if len(previous) == sim.passes else -1]
        cells = traj.initial_fields(v, prior)
        values, final = traj.run(cells)
        observed.append(values)
        finals.append(final)
        if traj.weights is not None:
            breedw = traj.weights.breedw
    return MemberResult(member, observed, finals, breedw)


def run_ensembles(
    sim: Simulation,
    previous: Optional[List[List[FieldSet]]] = None,
    max_workers: Optional[int] = None,
) -> List[MemberResult]:
    """Integrate every serial x parallel ensemble member.

    Member m uses random stream m whatever the lane layout, and results are
    returned in member order so the reduction is independent of scheduling.
    """
    _, serial, parallel = sim.cfg.ensembles
    members = serial * parallel
    lanes = max_workers or get_settings().max_workers or parallel
    lanes = max(1, min(lanes, members))

    def task(m: int) -> MemberResult:
        prior = None if previous is None else previous[m]
        return _run_member(sim, m, prior)

    logger.debug(f"Running {members} ensemble members on {lanes} lanes")
    if lanes == 1:
        return [task(m) for m in range(members)]
    with ThreadPoolExecutor(max_workers=lanes) as pool:
        return list(pool.map(task, range(members)))


def _layout_params(
    params: Params, grid: Grid, spec: ObserveSpec, values: np.ndarray
) -> Params:
    """Parameter object whose coordinates broadcast over (time, space..., bins...)."""
    extra = values.ndim - grid.dimensions - 1
    view = params.view(trailing=max(extra, 0))
    shape = [1] * (grid.dimensions + max(extra, 0))
    shape[0] = grid.points[0]
    view.t = grid.r[0].reshape(shape)
    view.r = (view.t,) + tuple(view.r[1:])
    if spec.temporal:
        view.w = np.array(_frequency_axis(grid)).reshape(shape)
        view.k = (view.w,) + tuple(view.k[1:])
    if spec.binned:
        centers = bin_centers(spec.binranges or [])
        offset = grid.dimensions
        o = []
        for i, c in enumerate(centers):
            s = [1] * len(shape)
            s[offset + i] = c.size
            o.append(c.reshape(s))
        view.o = tuple(o)
    return view


def _frequency_axis(grid: Grid) -> np.ndarray:
    padded = grid.points[0] * grid.steps
    dw = 2 * math.pi / (padded * grid.dtr)
    return to_centered(fft_wavenumbers(grid.points[0], dw), 0)


def _graph_axes(grid: Grid, spec: ObserveSpec, values: np.ndarray
                ) -> Tuple[List[np.ndarray], List[str]]:
    flags = list(spec.transforms) + [0] * grid.dimensions
    axes = [_frequency_axis(grid) if spec.temporal else np.array(grid.r[0])]
    names = ["w" if spec.temporal else "t"]
    labels = {2: "x", 3: "y", 4: "z"}
    for dim in range(2, grid.dimensions + 1):
        label = labels.get(dim, f"x{dim}")
        if flags[dim - 1]:
            axes.append(momentum_axis(grid, dim, "graphics-centered"))
            names.append("k" + label)
        else:
            axes.append(np.array(grid.r[dim - 1]))
            names.append(label)
    if spec.binned:
        for i, c in enumerate(bin_centers(spec.binranges or [])):
            axes.append(c)
            names.append(f"bin{i + 1}")
    elif spec.scatters > 0:
        axes.append(np.arange(1, spec.scatters + 1, dtype=float))
        names.append("sample")
    return axes, names


def _fit_data(value: Any, target: Tuple[int, ...], what: str) -> np.ndarray:
    arr = np.real(np.asarray(value, dtype=complex))
    if arr.ndim == len(target) - 1:
        arr = arr[np.newaxis]
    try:
        return np.array(np.broadcast_to(arr, target), dtype=float)
    except ValueError as e:
        raise ShapeError(f"{what} returned shape {arr.shape}, expected {target}") from e


def _apply_outputs(
    sim: Simulation, params: Params, observed: List[Optional[np.ndarray]]
) -> List[Optional[np.ndarray]]:
    out = list(observed)
    for n, spec in enumerate(sim.specs):
        if spec is None or spec.output is None:
            continue
        base = next((o for o in observed if o is not None), None)
        target = observed[n].shape if observed[n] is not None else None
        p = _layout_params(params, sim.grid, spec,
                           observed[n] if observed[n] is not None else base)
        value = np.real(np.asarray(spec.output(observed, p)))
        if target is not None:
            value = _fit_data(value, target, f"output {n + 1}")
        elif value.ndim == sim.grid.dimensions:
            value = value[np.newaxis]
        out[n] = value
    return out


def _bin_volume(spec: ObserveSpec) -> float:
    volume = 1.0
    for r in spec.binranges or []:
        edges = bin_edges(r)
        if edges is not None:
            volume *= edges[1] - edges[0]
    return volume


def combine(sim: Simulation, members: List[MemberResult]
            ) -> List[Optional[ErrorPlanes]]:
    """Merge member averages into planes for every graph."""
    cfg = sim.cfg
    params = Params(cfg, sim.grid)
    per_pass = [
        [_apply_outputs(sim, params, m.observed[p]) for m in members]
        for p in range(sim.passes)
    ]
    fine = sim.passes - 1
    planes: List[Optional[ErrorPlanes]] = []
    for n, spec in enumerate(sim.specs):
        if spec is None or per_pass[fine][0][n] is None:
            planes.append(None)
            continue
        if spec.scatters > 0 and not spec.binned and spec.output is None:
            planes.append(_scatter_planes(sim, spec, per_pass[fine][0][n]))
            continue
        fine_means = [m[n] for m in per_pass[fine]]
        mean, sigma = sampling_stats(fine_means)
        values = np.zeros(mean.shape + (NPLANES,))
        available = [True, False, sigma is not None, False, False, False]
        step_error = None
        if sim.passes == 2:
            coarse_mean, _ = sampling_stats([m[n] for m in per_pass[0]])
            mean, step_error = extrapolate(mean, coarse_mean, sim.order)
            available[1] = True
        values[..., 0] = mean
        if step_error is not None:
            values[..., 1] = step_error
        if sigma is not None:
            values[..., 2] = sigma
        chi2 = None
        if spec.compare is not None:
            p = _layout_params(params, sim.grid, spec, mean)
            result = spec.compare(p)
            parts = result if isinstance(result, tuple) else (result,)
            for c, part in enumerate(parts[:3]):
                values[..., 3 + c] = _fit_data(part, mean.shape, f"compare {n + 1}")
                available[3 + c] = True
            scale = float(cfg.graph_item(cfg.scale, n, 0.0))
            if sigma is not None or scale > 0:
                chi2 = chi_squared(
                    mean, sigma, values[..., 3],
                    values[..., 5] if available[5] else None,
                    cutoff=cfg.graph_item(cfg.cutoffs, n, cfg.cutoff),
                    mincount=cfg.mincount,
                    scale=scale,
                    volume=_bin_volume(spec),
                )
                if chi2.k == 0:
                    logger.warning(f"Graph {n + 1}: no points contribute to chi-squared")
        axes, names = _graph_axes(sim.grid, spec, mean)
        planes.append(ErrorPlanes(values, tuple(available), chi2, False, axes, names))
    return planes


def _scatter_planes(sim: Simulation, spec: ObserveSpec, raw: np.ndarray
                    ) -> ErrorPlanes:
    values = np.zeros(raw.shape + (NPLANES,))
    values[..., 0] = raw
    axes, names = _graph_axes(sim.grid, spec, raw)
    return ErrorPlanes(values, (True,) + (False,) * (NPLANES - 1), None, True,
                       axes, names)


def _as_sequence(sequence: Sequenceable) -> List[SimConfig]:
    if isinstance(sequence, SimConfig):
        return [sequence]
    configs = list(sequence)
    if not configs:
        raise ConfigurationError("A simulation sequence needs at least one config")
    return configs


def simulate(sequence: Sequenceable, max_workers: Optional[int] = None
             ) -> Tuple[ErrorVector, ResultData]:
    """Run a sequence of simulations and return the error summary and data."""
    configs = _as_sequence(sequence)
    outer = configs[0].ensembles[1:]
    for cfg in configs[1:]:
        if cfg.ensembles[1:] != outer:
            raise ConfigurationError(
                "Serial and parallel ensemble sizes can't change during a sequence"
            )
    data: List[List[Optional[ErrorPlanes]]] = []
    grids: List[Grid] = []
    records: List[Dict[str, Any]] = []
    raw: Dict[Tuple[int, int, int], List[np.ndarray]] = {}
    previous: Optional[List[List[FieldSet]]] = None
    time_origin: Optional[float] = None
    with Timer() as timer:
        for s, cfg in enumerate(configs):
            sim = prepare(cfg, s, time_origin)
            logger.info(
                f"Sequence {s + 1}/{len(configs)} '{cfg.name}': method={sim.method.name}, "
                f"dtr={sim.grid.dtr:.4g}, ensembles={cfg.ensembles}, "
                f"checks={cfg.checks}"
            )
            try:
                members = run_ensembles(sim, previous, max_workers)
            except DivergenceError as e:
                raise DivergenceError(e.message, e.t, e.method, sequence=s + 1) from e
            data.append(combine(sim, members))
            grids.append(sim.grid)
            record = cfg.resolved()
            record["seed"] = sim.seed
            record["origins"] = list(sim.grid.origins)
            records.append(record)
            if cfg.rawdata:
                for m in members:
                    for p, final in enumerate(m.final):
                        raw[(s, p, m.member)] = final
            previous = [m.final for m in members]
            time_origin = sim.grid.origins[0] + sim.grid.ranges[0]
    vector = summarize(
        [g for seq in data for g in seq],
        relerr=configs[-1].relerr,
        rmserr=configs[-1].rmserr,
        elapsed=timer.elapsed or 0.0,
        diff=configs[-1].diff,
    )
    results = ResultData(data, grids, records, raw, vector)
    logger.info(
        f"Finished in {vector.elapsed:.2f}s: step={vector.step:.3g}, "
        f"sampling={vector.sampling:.3g}, diff={vector.comparison:.3g}"
    )
    target = next((c.file for c in configs if c.file), None)
    if target:
        write_results(target, results)
    return vector, results


@dataclass
class ScanTable:
    """One extracted value per scanned parameter value."""

    key: str
    values: List[Any]
    mean: np.ndarray
    step: np.ndarray
    sampling: np.ndarray
    comparison: Optional[np.ndarray] = None
    rows: List[Dict[str, Any]] = field(default_factory=list)


def scan_parameter(
    base: SimConfig,
    key: str,
    values: Sequence[Any],
    extract: Tuple[int, int, int] = (1, 0, -1),
    compare: Optional[Callable[[Any], float]] = None,
) -> ScanTable:
    """Run the base config once per value of ``key`` and tabulate one point.

    ``extract`` is (graph, line, time index) with a 1-based graph number.
    Space dimensions are sampled at their midpoint. Run i uses seed
    base.seed + i.
    """
    if not values:
        raise ConfigurationError("A scan needs at least one value")
    graph, line, time_index = extract
    means, steps, samps = [], [], []
    for i, value in enumerate(values):
        cfg = base.with_overrides({key: value, "seed": base.seed + i})
        _, results = simulate([cfg])
        planes = results.graph(graph)
        index = [line, time_index] + [
            n // 2 for n in planes.values.shape[2:-1]
        ]
        point = planes.values[tuple(index)]
        means.append(point[0])
        steps.append(point[1])
        samps.append(point[2])
        logger.info(f"Scan {key}={value}: mean={point[0]:.4g}")
    table = ScanTable(key, list(values), np.array(means), np.array(steps),
                      np.array(samps))
    if compare is not None:
        table.comparison = np.array([compare(v) for v in values], dtype=float)
    table.rows = [
        {"value": v, "mean": float(m), "step": float(st), "sampling": float(sa)}
        for v, m, st, sa in zip(values, means, steps, samps)
    ]
    return table
