"""Error estimates: step-size extrapolation, sampling statistics,
goodness-of-fit against comparisons and the summary error vector."""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import SimConfig
from .exceptions import ConfigurationError, ShapeError

logger = logging.getLogger(__name__)

PLANES = ("mean", "step", "sampling", "compare", "compare_systematic",
          "compare_statistical")
NPLANES = len(PLANES)
NEGLIGIBLE = 1e-10


def epsilon(order: int) -> float:
    """Extrapolation weight 1/(2**order - 1); zero order means none."""
    if order < 0:
        raise ConfigurationError("Extrapolation order must be non-negative")
    return 0.0 if order == 0 else 1.0 / (2**order - 1)


def extrapolate(
    fine: Any, coarse: Any, order: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Richardson-extrapolated value and its step error.

    With order 0 the fine result is returned unchanged and the error is
    the fine/coarse difference. Otherwise the error is the distance
    between the extrapolated value and the fine result.
    """
    fine = np.asarray(fine)
    coarse = np.asarray(coarse)
    if fine.shape != coarse.shape:
        raise ShapeError(
            "Fine and coarse results differ in shape",
            {"fine": fine.shape, "coarse": coarse.shape},
        )
    if order == 0:
        return fine, np.abs(fine - coarse)
    eps = epsilon(order)
    value = (1 + eps) * fine - eps * coarse
    return value, np.abs(value - fine)


def sampling_stats(
    sub_means: Sequence[np.ndarray],
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """Grand mean and standard error from sub-ensemble means.

    The standard error needs at least two sub-ensembles; with one it is
    None (absent, not zero).
    """
    if not sub_means:
        raise ConfigurationError("No sub-ensemble means to combine")
    stack = np.stack([np.asarray(m) for m in sub_means])
    mean = np.mean(stack, axis=0)
    if stack.shape[0] < 2:
        return mean, None
    sigma = np.std(stack, axis=0, ddof=1) / math.sqrt(stack.shape[0])
    return mean, sigma


@dataclass
class FitStatistic:
    """A goodness-of-fit sum, its number of contributing points and the
    number of points dropped for a zero denominator."""

    value: float
    k: int
    excluded: int = 0

    @property
    def per_point(self) -> float:
        return self.value / self.k if self.k else 0.0


def chi_squared(
    mean: Any,
    sigma: Any,
    comparison: Any,
    comp_sigma: Any = None,
    cutoff: float = 1e-12,
    mincount: float = 10.0,
    scale: float = 0.0,
    volume: float = 1.0,
) -> FitStatistic:
    """Chi-squared of simulated data against a comparison.

    Variance mode (scale == 0) sums (p - e)^2 / (sigma^2 + sigma_e^2) over
    points where |p| and |e| exceed ``cutoff``. Count mode (scale > 0)
    treats scale * value * volume as counts N and E and sums
    (N - E)^2 / E over bins where both reach ``mincount``.
    """
    p = np.real(np.asarray(mean, dtype=complex)).ravel()
    e = np.real(np.asarray(comparison, dtype=complex)).ravel()
    if p.shape != e.shape:
        raise ShapeError("Data and comparison differ in size")
    if scale > 0:
        n = scale * volume * p
        big_e = scale * volume * e
        keep = (n >= mincount) & (big_e >= mincount)
        return FitStatistic(
            float(np.sum((n[keep] - big_e[keep]) ** 2 / big_e[keep])),
            int(np.sum(keep)),
        )
    var = np.zeros_like(p) if sigma is None else np.real(np.asarray(sigma)).ravel() ** 2
    if comp_sigma is not None:
        var = var + np.real(np.asarray(comp_sigma)).ravel() ** 2
    keep = (np.abs(p) > cutoff) & (np.abs(e) > cutoff)
    usable = keep & (var > 0)
    excluded = int(np.sum(keep & ~usable))
    if excluded:
        logger.debug(f"Excluded {excluded} points with zero variance from chi-squared")
    value = float(np.sum((p[usable] - e[usable]) ** 2 / var[usable]))
    return FitStatistic(value, int(np.sum(usable)), excluded)


def g_squared(counts: Any, expected: Any, mincount: float = 10.0) -> FitStatistic:
    """Likelihood-ratio statistic 2 sum N ln(N/E) over well-populated bins.

    Expected counts are rescaled so that their total matches the observed
    total over the contributing bins.
    """
    n = np.asarray(counts, dtype=float).ravel()
    e = np.asarray(expected, dtype=float).ravel()
    if n.shape != e.shape:
        raise ShapeError("Counts and expected counts differ in size")
    keep = (n >= mincount) & (e >= mincount) & (n > 0) & (e > 0)
    if not np.any(keep):
        logger.warning("No bins pass the count threshold for G-squared")
        return FitStatistic(0.0, 0)
    n = n[keep]
    e = e[keep] * np.sum(n) / np.sum(e[keep])
    return FitStatistic(float(2 * np.sum(n * np.log(n / e))), int(n.size))


@dataclass
class ErrorPlanes:
    """Per-graph result planes stacked on the last axis.

    Plane order: mean, step error, sampling error, comparison, comparison
    systematic error, comparison statistical error. ``available[c]`` is
    False for planes that were not computed. ``axes`` holds one coordinate
    array per data axis after the line axis.
    """

    values: np.ndarray
    available: Tuple[bool, ...]
    chi2: Optional[FitStatistic] = None
    scatter: bool = False
    axes: List[np.ndarray] = field(default_factory=list)
    axis_names: List[str] = field(default_factory=list)

    def plane(self, c: int) -> Optional[np.ndarray]:
        return self.values[..., c] if self.available[c] else None

    @property
    def mean(self) -> np.ndarray:
        return self.values[..., 0]


@dataclass
class ErrorVector:
    """Summary of a whole run."""

    total: float = 0.0
    step: float = 0.0
    sampling: float = 0.0
    comparison: float = 0.0
    chi2_per_k: float = 0.0
    elapsed: float = 0.0
    report: List[Dict[str, Any]] = field(default_factory=list)

    def scores(self) -> List[float]:
        """The error figures without the run time, which varies between runs."""
        return [self.total, self.step, self.sampling, self.comparison,
                self.chi2_per_k]

    def as_list(self) -> List[float]:
        return self.scores() + [self.elapsed]


def _measure(x: np.ndarray, rmserr: bool) -> float:
    if x.size == 0:
        return 0.0
    if rmserr:
        return float(np.sqrt(np.mean(np.abs(x) ** 2)))
    return float(np.max(np.abs(x)))


def _rms(values: Sequence[float]) -> float:
    kept = [v for v in values if v >= NEGLIGIBLE]
    return float(np.sqrt(np.mean(np.square(kept)))) if kept else 0.0


def summarize(
    planes: Sequence[Optional[ErrorPlanes]],
    relerr: bool = True,
    rmserr: bool = True,
    elapsed: float = 0.0,
    diff: bool = True,
) -> ErrorVector:
    """Collapse per-graph planes into RMS step, sampling and comparison errors.

    Each graph's error is the RMS (or maximum) over its points, normalized by
    the largest |mean| (or |comparison| for differences) when ``relerr`` is
    set and that normalizer is nonzero. Category totals are RMS values over
    graphs, ignoring entries below 1e-10; the overall total is the RMS over
    the categories that have any error. With ``diff`` off, comparison
    differences stay in the per-graph report but not in the totals.
    """
    step: List[float] = []
    sampling: List[float] = []
    diffs: List[float] = []
    chi_value = 0.0
    chi_k = 0
    report: List[Dict[str, Any]] = []
    for n, graph in enumerate(planes):
        if graph is None or graph.scatter:
            continue
        mean = graph.mean
        data_norm = float(np.max(np.abs(mean), initial=0.0))
        entry: Dict[str, Any] = {"graph": n + 1}
        for key, c, target in (("step", 1, step), ("sampling", 2, sampling)):
            values = graph.plane(c)
            if values is None:
                continue
            err = _measure(values, rmserr)
            if relerr and data_norm > 0:
                err /= data_norm
            entry[key] = err
            target.append(err)
        compare = graph.plane(3)
        if compare is not None:
            err = _measure(mean - compare, rmserr)
            norm = float(np.max(np.abs(compare), initial=0.0))
            if relerr and norm > 0:
                err /= norm
            entry["diff"] = err
            diffs.append(err)
        if graph.chi2 is not None:
            entry["chi2"] = graph.chi2.value
            entry["k"] = graph.chi2.k
            chi_value += graph.chi2.value
            chi_k += graph.chi2.k
        report.append(entry)
    categories = [_rms(step), _rms(sampling), _rms(diffs) if diff else 0.0]
    nonzero = [c for c in categories if c > 0]
    total = float(np.sqrt(np.mean(np.square(nonzero)))) if nonzero else 0.0
    if chi_k == 0 and any(g is not None and g.chi2 is not None for g in planes):
        logger.warning("Chi-squared has no contributing points")
    return ErrorVector(
        total=total,
        step=categories[0],
        sampling=categories[1],
        comparison=categories[2],
        chi2_per_k=chi_value / chi_k if chi_k else 0.0,
        elapsed=elapsed,
        report=report,
    )


@dataclass
class ConvergenceLevel:
    steps: int
    dt: float
    difference: float
    step_error: float
    sampling_error: float


@dataclass
class ConvergenceTable:
    levels: List[ConvergenceLevel]
    monotone: bool


def max_difference(results: Any) -> float:
    """Largest |mean - comparison| over every compared graph of a run."""
    worst = 0.0
    for sequence in results.data:
        for graph in sequence:
            if graph is None or graph.scatter:
                continue
            compare = graph.plane(3)
            if compare is not None:
                worst = max(worst, float(np.max(np.abs(graph.mean - compare),
                                                initial=0.0)))
    return worst


def xcheck(levels: int, cfg: SimConfig) -> ConvergenceTable:
    """Run a simulation repeatedly, doubling the steps per output point.

    Reports the largest deviation from the comparison functions at each
    level and whether it decreased monotonically. A non-monotone table is
    logged as a warning rather than raised.
    """
    from .engine import simulate

    if levels < 1:
        raise ConfigurationError("xcheck needs at least one level")
    if not any(f is not None for f in cfg.compare):
        raise ConfigurationError("xcheck needs comparison functions")
    table: List[ConvergenceLevel] = []
    for level in range(levels):
        steps = cfg.steps * 2**level
        run = cfg.with_overrides({"steps": steps})
        vector, results = simulate([run])
        grid_dt = results.grids[0].dt / steps
        table.append(
            ConvergenceLevel(steps, grid_dt, max_difference(results),
                             vector.step, vector.sampling)
        )
        logger.info(
            f"xcheck level {level + 1}: dt={grid_dt:.4g}, "
            f"difference={table[-1].difference:.4g}"
        )
    diffs = [lv.difference for lv in table]
    monotone = all(b <= a for a, b in zip(diffs, diffs[1:]))
    if not monotone:
        logger.warning("Comparison differences did not decrease with the step size")
    return ConvergenceTable(table, monotone)
