"""Observables: spatial integrals and averages, probability binning,
step-averaged fields for spectra, and per-time-point observe evaluation."""

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import simpson

from .exceptions import ConfigurationError, ShapeError
from .lattice import Grid
from .spectral import fourier_output_transform

logger = logging.getLogger(__name__)

WIDTH_TOLERANCE = 1e-9


def _space_axis(o: np.ndarray, dim: int, grid: Grid, trailing: int) -> int:
    nspace = grid.dimensions - 1
    offset = o.ndim - trailing - nspace
    if offset < 0:
        raise ShapeError(
            f"Array of shape {o.shape} has no axis for dimension {dim}",
            {"dimensions": grid.dimensions},
        )
    return offset + dim - 2


def _measure(measure: Any, grid: Grid) -> np.ndarray:
    values = np.atleast_1d(np.asarray(measure, dtype=float))
    if values.size == 1 and grid.dimensions > 1:
        full = np.zeros(grid.dimensions)
        full[1] = values[0]
        return full
    if values.size != grid.dimensions:
        raise ConfigurationError(
            f"Measure has {values.size} entries for {grid.dimensions} dimensions"
        )
    return values


def integrate(
    o: Any,
    measure: Any,
    grid: Grid,
    bounds: Optional[Sequence[Optional[Sequence[float]]]] = None,
    trailing: int = 1,
    periodic: Optional[Sequence[bool]] = None,
) -> np.ndarray:
    """Space integral over the dimensions j with measure[j-1] > 0.

    Periodic dimensions use the lattice sum; other dimensions use the
    trapezoidal rule. ``bounds[j-1] = (lo, hi)`` restricts the domain.
    Integrated axes are kept as singletons.
    """
    out = np.asarray(o)
    values = _measure(measure, grid)
    for dim in range(2, grid.dimensions + 1):
        h = values[dim - 1]
        if h <= 0:
            continue
        axis = _space_axis(out, dim, grid, trailing)
        n = out.shape[axis]
        weights = np.full(n, h)
        is_periodic = True if periodic is None else periodic[dim - 2]
        if not is_periodic:
            weights[0] = weights[-1] = h / 2
        if bounds is not None and dim - 1 < len(bounds) and bounds[dim - 1] is not None:
            lo, hi = bounds[dim - 1]
            coords = grid.r[dim - 1]
            weights = np.where((coords >= lo) & (coords <= hi), weights, 0.0)
        shape = [1] * out.ndim
        shape[axis] = n
        out = np.sum(out * weights.reshape(shape), axis=axis, keepdims=True)
    return out


def ave(
    o: Any, grid: Grid, av: Optional[Sequence[float]] = None, trailing: int = 1
) -> np.ndarray:
    """Mean over the flagged space dimensions (default: all of them)."""
    out = np.asarray(o)
    flags = [0] + [1] * (grid.dimensions - 1) if av is None else list(av)
    if len(flags) != grid.dimensions:
        raise ConfigurationError(
            f"Average switch has {len(flags)} entries for {grid.dimensions} dimensions"
        )
    for dim in range(2, grid.dimensions + 1):
        if flags[dim - 1] > 0:
            axis = _space_axis(out, dim, grid, trailing)
            out = np.mean(out, axis=axis, keepdims=True)
    return out


def bin_edges(spec: Any) -> Optional[np.ndarray]:
    """Validated bin edges, or None for a marginalized variable."""
    if spec is None:
        return None
    edges = np.asarray(spec, dtype=float).ravel()
    if edges.size == 0:
        return None
    if edges.size < 2:
        raise ConfigurationError("A binning range needs at least two edges")
    widths = np.diff(edges)
    if widths[0] <= 0 or not np.allclose(widths, widths[0], rtol=WIDTH_TOLERANCE):
        raise ConfigurationError("Probability bins must have equal positive widths")
    return edges


def bin_centers(binranges: Sequence[Any]) -> List[np.ndarray]:
    centers = []
    for spec in binranges:
        edges = bin_edges(spec)
        if edges is not None:
            centers.append((edges[:-1] + edges[1:]) / 2)
    return centers


def bin_average_density(
    density: Callable[[np.ndarray], np.ndarray], spec: Any, points: int = 5
) -> np.ndarray:
    """Average of an analytic density over each bin, by Simpson's rule.

    Comparing a binned histogram with the density at bin centers is biased
    when the density curves across a bin; this gives the bin average instead.
    ``density`` is called with sample points of shape (bins, points) and may
    return extra leading axes, for example one per time point.
    """
    edges = bin_edges(spec)
    if edges is None:
        raise ConfigurationError("Bin averaging needs a binned variable")
    if points < 3 or points % 2 == 0:
        raise ConfigurationError("Simpson's rule needs an odd number of points >= 3")
    fractions = np.linspace(0.0, 1.0, points)
    x = edges[:-1, np.newaxis] + np.diff(edges)[:, np.newaxis] * fractions
    values = np.asarray(density(x), dtype=float)
    width = edges[1] - edges[0]
    return simpson(values, dx=width / (points - 1), axis=-1) / width


def bin_probability(
    samples: np.ndarray,
    binranges: Sequence[Any],
    weights: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Joint probability density of the binned lines of an observable.

    ``samples`` has shape (lines, rest..., ensemble); every point of ``rest``
    is binned independently. Line m is binned with ``binranges[m]``; empty
    ranges marginalize that line, and lines or ranges without a partner are
    ignored. Returns shape (rest..., bins_1, ..., bins_K).
    """
    samples = np.real(np.asarray(samples))
    pairs: List[Tuple[int, np.ndarray]] = []
    for m, spec in enumerate(binranges[: samples.shape[0]]):
        edges = bin_edges(spec)
        if edges is not None:
            pairs.append((m, edges))
    if not pairs:
        raise ConfigurationError("No binned variables for a probability observable")
    rest = samples.shape[1:-1]
    ensemble = samples.shape[-1]
    nrest = int(np.prod(rest)) if rest else 1
    nbins = tuple(edges.size - 1 for _, edges in pairs)
    valid = np.ones((nrest, ensemble), dtype=bool)
    index = []
    volume = 1.0
    for m, edges in pairs:
        width = edges[1] - edges[0]
        volume *= width
        x = samples[m].reshape(nrest, ensemble)
        j = np.floor((x - edges[0]) / width).astype(int)
        j = np.where(x == edges[-1], edges.size - 2, j)
        valid &= (j >= 0) & (j < edges.size - 1)
        index.append(np.clip(j, 0, edges.size - 2))
    linear = np.ravel_multi_index(tuple(index), nbins)
    w = np.ones(ensemble) if weights is None else np.asarray(weights, dtype=float)
    contribution = np.where(valid, w[np.newaxis, :], 0.0) / (volume * ensemble)
    counts = np.zeros((nrest, int(np.prod(nbins))))
    rows = np.broadcast_to(np.arange(nrest)[:, np.newaxis], linear.shape)
    np.add.at(counts, (rows, linear), contribution)
    return counts.reshape(*rest, *nbins)


def spectral_field_average(values: Sequence[np.ndarray]) -> np.ndarray:
    """Field averaged over one coarse step for temporal spectra.

    Two values (start, end) give the trapezoid mean; three values
    (start, middle, end) from a refined pass give (a0 + 2*a1 + a2)/4.
    """
    if len(values) == 2:
        return (values[0] + values[1]) / 2
    if len(values) == 3:
        return (values[0] + 2 * values[1] + values[2]) / 4
    raise ShapeError("Step averages need two or three field values")


@dataclass
class ObserveSpec:
    """How one graph is computed from the fields."""

    observe: Optional[Callable[..., Any]]
    transforms: List[int] = field(default_factory=list)
    binranges: Optional[List[Any]] = None
    scatters: int = 0
    output: Optional[Callable[..., Any]] = None
    compare: Optional[Callable[..., Any]] = None

    @property
    def temporal(self) -> bool:
        return bool(self.transforms) and bool(self.transforms[0])

    @property
    def spatial(self) -> bool:
        return any(self.transforms[1:])

    @property
    def binned(self) -> bool:
        return bool(self.binranges) and any(
            bin_edges(spec) is not None for spec in self.binranges
        )


def normalize_observed(value: Any, grid: Grid, ensemble: int) -> np.ndarray:
    """Shape an observe result as (lines, space..., ensemble)."""
    o = np.asarray(value)
    target_ndim = grid.dimensions + 1
    if o.ndim == 0:
        o = o.reshape((1,) * target_ndim)
    elif o.ndim == target_ndim - 1:
        o = o[np.newaxis]
    if o.ndim != target_ndim or o.shape[-1] not in (1, ensemble):
        raise ShapeError(
            f"Observe result of shape {np.shape(value)} lacks the ensemble axis",
            {"ensemble": ensemble},
        )
    shape = (o.shape[0], *[max(s, 1) for s in o.shape[1:-1]], ensemble)
    return np.broadcast_to(o, shape)


def reduce_observed(
    o: np.ndarray,
    spec: ObserveSpec,
    weights: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Ensemble mean, binned density or captured scatter of one observable."""
    if spec.binned:
        density = bin_probability(o, spec.binranges or [], weights)
        return density[np.newaxis]
    if spec.scatters > 0:
        return np.real(o[..., : spec.scatters])
    if weights is None:
        return np.real(np.mean(o, axis=-1))
    return np.real(np.sum(o * weights, axis=-1) / np.sum(weights))


def transform_fields(
    cells: Sequence[np.ndarray], flags: Sequence[int], grid: Grid
) -> List[np.ndarray]:
    if not any(flags[1:]):
        return list(cells)
    return [fourier_output_transform(a, flags, grid, lead=1) for a in cells]


def evaluate_observables(
    cells: Sequence[np.ndarray],
    aux: Sequence[np.ndarray],
    specs: Sequence[Optional[ObserveSpec]],
    grid: Grid,
    params: Any,
    weights: Optional[np.ndarray] = None,
) -> List[Optional[np.ndarray]]:
    """Evaluate every graph at one time (or frequency) point.

    Data is transformed before observe is applied. Auxiliary fields follow
    the integrated cells in the observe argument list. Graphs with no spec
    (not computed) or no observe callback yield None.
    """
    ensemble = cells[0].shape[-1]
    results: List[Optional[np.ndarray]] = []
    for spec in specs:
        if spec is None or spec.observe is None:
            results.append(None)
            continue
        flags = spec.transforms or [0] * grid.dimensions
        args = transform_fields(list(cells) + list(aux), flags, grid)
        o = normalize_observed(spec.observe(*args, params), grid, ensemble)
        results.append(reduce_observed(o, spec, weights))
    return results
