"""Central finite-difference derivatives and transverse boundary values."""

import logging
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import SimConfig
from .exceptions import ConfigurationError, UnsupportedOperationError
from .lattice import Grid

logger = logging.getLogger(__name__)

BoundaryPair = Tuple[int, int]


def _prepare(
    a: np.ndarray, dim: int, grid: Grid, pairs: Sequence[BoundaryPair],
    indices: Optional[Sequence[int]],
) -> Tuple[np.ndarray, List[BoundaryPair], List[int], bool, int]:
    if dim == 1:
        raise UnsupportedOperationError("Time derivatives are not available")
    if not 2 <= dim <= grid.dimensions:
        raise ConfigurationError(f"Dimension {dim} is not a space dimension")
    a = np.asarray(a)
    squeezed = a.ndim == grid.dimensions
    if squeezed:
        a = a[np.newaxis]
    axis = dim - 1
    if a.shape[axis] < 3:
        raise ConfigurationError(
            "Finite differences need at least 3 points", {"dimension": dim}
        )
    chosen = list(indices) if indices is not None else list(range(a.shape[0]))
    if len(chosen) == 1 and a.shape[0] > 1:
        chosen = chosen * a.shape[0]
    if len(chosen) != a.shape[0]:
        raise ConfigurationError(
            "One boundary pair is needed per differentiated component"
        )
    rows = [(int(pairs[i][0]), int(pairs[i][1])) for i in chosen]
    return a, rows, chosen, squeezed, axis


def _edges(bvals: Optional[np.ndarray], axis: int, component: int) -> Tuple[Any, Any]:
    if bvals is None:
        return 0.0, 0.0
    b = np.asarray(bvals)
    row = b[component] if b.shape[0] > 1 else b[0]
    lo = np.take(row, 0, axis=axis - 1)
    hi = np.take(row, 1, axis=axis - 1)
    return lo, hi


def _at(a: np.ndarray, axis: int, index: int) -> np.ndarray:
    return np.take(a, index, axis=axis)


def _set(out: np.ndarray, i: int, axis: int, index: int, value: Any) -> None:
    target = [slice(None)] * out.ndim
    target[0] = i
    target[axis] = index
    out[tuple(target)] = value


def d1(
    a: np.ndarray,
    dim: int,
    grid: Grid,
    pairs: Sequence[BoundaryPair],
    bvals: Optional[np.ndarray] = None,
    indices: Optional[Sequence[int]] = None,
) -> np.ndarray:
    """First derivative by central differences.

    At a Dirichlet boundary the prescribed value is the ghost point; at a
    Robin boundary the prescribed derivative is returned; periodic boundaries
    wrap around.
    """
    a, rows, comps, squeezed, axis = _prepare(a, dim, grid, pairs, indices)
    h = grid.dx[dim - 1]
    out = (np.roll(a, -1, axis) - np.roll(a, 1, axis)) / (2 * h)
    n = a.shape[axis]
    for i, (lo_type, hi_type) in enumerate(rows):
        lo, hi = _edges(bvals, axis, comps[i])
        ai = a[i]
        if lo_type == 1:
            _set(out, i, axis, 0, (_at(ai, axis - 1, 1) - lo) / (2 * h))
        elif lo_type == -1:
            _set(out, i, axis, 0, lo)
        if hi_type == 1:
            _set(out, i, axis, n - 1, (hi - _at(ai, axis - 1, n - 2)) / (2 * h))
        elif hi_type == -1:
            _set(out, i, axis, n - 1, hi)
    return out[0] if squeezed else out


def d2(
    a: np.ndarray,
    dim: int,
    grid: Grid,
    pairs: Sequence[BoundaryPair],
    bvals: Optional[np.ndarray] = None,
    indices: Optional[Sequence[int]] = None,
) -> np.ndarray:
    """Second derivative by central differences with boundary ghost points."""
    a, rows, comps, squeezed, axis = _prepare(a, dim, grid, pairs, indices)
    h = grid.dx[dim - 1]
    out = (np.roll(a, -1, axis) - 2 * a + np.roll(a, 1, axis)) / h**2
    n = a.shape[axis]
    for i, (lo_type, hi_type) in enumerate(rows):
        lo, hi = _edges(bvals, axis, comps[i])
        ai = a[i]
        first, second = _at(ai, axis - 1, 0), _at(ai, axis - 1, 1)
        last, before = _at(ai, axis - 1, n - 1), _at(ai, axis - 1, n - 2)
        if lo_type == 1:
            _set(out, i, axis, 0, (second - 2 * first + lo) / h**2)
        elif lo_type == -1:
            _set(out, i, axis, 0, 2 * (second - first - lo * h) / h**2)
        if hi_type == 1:
            _set(out, i, axis, n - 1, (hi - 2 * last + before) / h**2)
        elif hi_type == -1:
            _set(out, i, axis, n - 1, 2 * (before - last + hi * h) / h**2)
    return out[0] if squeezed else out


class BoundaryValues:
    """Boundary arrays per (cell, dimension).

    Each array has the field layout with the boundary dimension's axis of
    length 2: index 0 is the lower boundary and 1 the upper. Entries are
    field values at Dirichlet boundaries and derivatives at Robin ones.
    """

    def __init__(self, values: Optional[Dict[Tuple[int, int], np.ndarray]] = None):
        self.values: Dict[Tuple[int, int], np.ndarray] = dict(values or {})

    def get(self, cell: int, dim: int) -> Optional[np.ndarray]:
        return self.values.get((cell, dim))

    def cell(self, cell: int) -> Dict[int, np.ndarray]:
        return {dim: v for (c, dim), v in self.values.items() if c == cell}


def boundary_shape(grid: Grid, nfields: int, dim: int, ensemble: int) -> Tuple[int, ...]:
    shape = list(grid.field_shape(nfields, ensemble))
    shape[dim - 1] = 2
    return tuple(shape)


def eval_boundaries(
    a: Sequence[np.ndarray],
    t: float,
    cfg: SimConfig,
    grid: Grid,
    params: Any,
    boundfun: Optional[Callable[..., Any]] = None,
) -> BoundaryValues:
    """Boundary arrays for every cell and space dimension at time t.

    Without a boundary callback the static ``boundval`` entries are used,
    which default to zero.
    """
    values: Dict[Tuple[int, int], np.ndarray] = {}
    fun = boundfun if boundfun is not None else cfg.boundfun
    for c, field in enumerate(a):
        nfields = cfg.fields[c] if c < cfg.cells else field.shape[0]
        ensemble = field.shape[-1]
        for dim in range(2, grid.dimensions + 1):
            target = boundary_shape(grid, nfields, dim, ensemble)
            if fun is not None:
                params.t = t
                raw = np.asarray(fun(field, c + 1, dim, params))
            else:
                rows = np.array(cfg.static_boundary_values(c, dim), dtype=float)
                shape = [1] * len(target)
                shape[0] = nfields
                shape[dim - 1] = 2
                raw = rows.reshape(shape)
            try:
                values[(c, dim)] = np.array(np.broadcast_to(raw, target), dtype=complex)
            except ValueError as e:
                raise ConfigurationError(
                    f"Boundary values of shape {raw.shape} do not fit {target}",
                    {"cell": c + 1, "dimension": dim},
                ) from e
    return BoundaryValues(values)


class BoundaryEvaluator:
    """Evaluates boundary values during a trajectory block.

    Static values are computed once. With a boundary callback, it is first
    called before the start time with the initial random fields so that any
    stochastic boundary data can be fixed; that result is kept in
    ``initial`` and exposed to later calls as ``params.boundinit``.
    """

    def __init__(self, cfg: SimConfig, grid: Grid, params: Any):
        self.cfg = cfg
        self.grid = grid
        self.params = params
        self.initial: Optional[BoundaryValues] = None
        self._static: Optional[BoundaryValues] = None

    @property
    def active(self) -> bool:
        return self.grid.dimensions > 1

    def initialize(self, randoms: Sequence[np.ndarray]) -> None:
        if not self.active:
            return
        if self.cfg.boundfun is None:
            return
        saved = self.params.t
        self.initial = eval_boundaries(
            list(randoms), self.grid.origins[0] - self.grid.dt, self.cfg, self.grid,
            self.params,
        )
        self.params.boundinit = self.initial
        self.params.t = saved

    def evaluate(self, a: Sequence[np.ndarray], t: float) -> BoundaryValues:
        if not self.active:
            return BoundaryValues()
        if self.cfg.boundfun is None:
            if self._static is None:
                self._static = eval_boundaries(a, t, self.cfg, self.grid, self.params)
            return self._static
        saved = self.params.t
        values = eval_boundaries(a, t, self.cfg, self.grid, self.params)
        self.params.t = saved
        return values
