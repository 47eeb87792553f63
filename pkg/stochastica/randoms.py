"""Initial random fields and propagation noises on the lattice.

Random numbers come from counter-based Philox generators keyed by
(base seed, ensemble stream, counter), so every trajectory block and every
step can be regenerated independently of scheduling. This is what lets the
coarse pass of an error check rebuild its noise from the fine noises instead
of storing them.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Optional, Tuple

import numpy as np
import scipy.fft as sfft

from .exceptions import ConfigurationError, NoiseGenerationError, ShapeError
from .lattice import Grid

logger = logging.getLogger(__name__)

NoiseSet = np.ndarray

INITIAL_COUNTER = 2**32 - 1


@dataclass(frozen=True)
class NoiseSpec:
    """Numbers of each kind of noise and initial random field."""

    noises: int = 0
    knoises: int = 0
    unoises: int = 0
    inrandoms: int = 0
    krandoms: int = 0
    urandoms: int = 0
    nfilter: Optional[Callable[..., Any]] = None
    rfilter: Optional[Callable[..., Any]] = None

    def __post_init__(self) -> None:
        counts = (self.noises, self.knoises, self.unoises,
                  self.inrandoms, self.krandoms, self.urandoms)
        if any(c < 0 for c in counts):
            raise ConfigurationError("Noise dimensions must be non-negative")

    @property
    def gaussian_rows(self) -> int:
        return self.noises + self.knoises

    @property
    def total(self) -> int:
        return self.noises + self.knoises + self.unoises

    @property
    def initial_total(self) -> int:
        return self.inrandoms + self.krandoms + self.urandoms


@dataclass(frozen=True)
class RngState:
    """Seed and stream identifying one independent random sequence."""

    seed: int
    stream: int = 0
    algorithm: str = "philox"

    def generator(self, *counter: int) -> np.random.Generator:
        """Generator for a given counter, e.g. (sequence, pass, step)."""
        if self.algorithm != "philox":
            raise ConfigurationError(f"Unknown RNG algorithm '{self.algorithm}'")
        sequence = np.random.SeedSequence(
            entropy=self.seed, spawn_key=(self.stream, *counter)
        )
        return np.random.Generator(np.random.Philox(sequence))


def _gaussian(
    gen: np.random.Generator, rows: int, grid: Grid, ensemble: int, variance: float
) -> np.ndarray:
    shape = grid.field_shape(rows, ensemble)
    return gen.standard_normal(shape) * math.sqrt(variance)


def _filtered(
    gen: np.random.Generator,
    rows: int,
    grid: Grid,
    ensemble: int,
    variance: float,
    filt: Optional[Callable[..., Any]],
    params: Any,
) -> np.ndarray:
    """x-space Gaussian passed through a momentum-space filter."""
    xi = _gaussian(gen, rows, grid, ensemble, variance)
    if rows == 0:
        return xi.astype(complex)
    axes = tuple(range(1, grid.dimensions))
    spectrum = sfft.fftn(xi, axes=axes) if axes else xi.astype(complex)
    if filt is not None:
        filtered = np.asarray(filt(spectrum, params))
        try:
            spectrum = np.broadcast_to(filtered, spectrum.shape)
        except ValueError as e:
            raise NoiseGenerationError(
                f"Noise filter returned shape {filtered.shape}, "
                f"expected {spectrum.shape}"
            ) from e
    return sfft.ifftn(spectrum, axes=axes) if axes else np.array(spectrum)


def _assemble(parts: Tuple[np.ndarray, ...]) -> NoiseSet:
    if any(np.iscomplexobj(p) for p in parts):
        return np.concatenate([p.astype(complex) for p in parts], axis=0)
    return np.concatenate(parts, axis=0)


def propagation_noise(
    grid: Grid,
    spec: NoiseSpec,
    dt: float,
    gen: np.random.Generator,
    ensemble: int,
    params: Any = None,
) -> NoiseSet:
    """Noises for one computational step of length dt.

    Rows are ordered [noises, knoises, unoises]. Gaussian rows have variance
    1/(dt*dV); uniform rows are drawn on [0, 1/dt].
    """
    if dt <= 0:
        raise ConfigurationError("Noise time step must be positive")
    variance = 1.0 / (dt * grid.dV)
    plain = _gaussian(gen, spec.noises, grid, ensemble, variance)
    kspace = _filtered(gen, spec.knoises, grid, ensemble, variance, spec.nfilter, params)
    uniform = gen.uniform(0.0, 1.0 / dt, grid.field_shape(spec.unoises, ensemble))
    return _assemble((plain, kspace, uniform))


def initial_randoms(
    grid: Grid,
    spec: NoiseSpec,
    gen: np.random.Generator,
    ensemble: int,
    params: Any = None,
) -> NoiseSet:
    """Initial random fields: Gaussian variance 1/dV, uniform on [0, 1]."""
    variance = 1.0 / grid.dV
    plain = _gaussian(gen, spec.inrandoms, grid, ensemble, variance)
    kspace = _filtered(
        gen, spec.krandoms, grid, ensemble, variance, spec.rfilter, params
    )
    uniform = gen.uniform(0.0, 1.0, grid.field_shape(spec.urandoms, ensemble))
    return _assemble((plain, kspace, uniform))


def _check(fine_a: NoiseSet, fine_b: NoiseSet) -> None:
    if fine_a.shape != fine_b.shape:
        raise ShapeError(
            "Fine noises must have the same shape to be coarsened",
            {"first": fine_a.shape, "second": fine_b.shape},
        )


def coarsen_gaussian(fine_a: NoiseSet, fine_b: NoiseSet) -> NoiseSet:
    """Average of two successive fine Gaussian noises."""
    _check(fine_a, fine_b)
    return (fine_a + fine_b) / 2


def coarsen_uniform(fine_a: NoiseSet, fine_b: NoiseSet) -> NoiseSet:
    """Minimum of two fine uniform noises: a jump in either fine step survives."""
    _check(fine_a, fine_b)
    return np.minimum(np.real(fine_a), np.real(fine_b))


def coarsen_noise(fine_a: NoiseSet, fine_b: NoiseSet, spec: NoiseSpec) -> NoiseSet:
    """Coarse-step noise from a fine pair, row by row according to its kind."""
    _check(fine_a, fine_b)
    g = spec.gaussian_rows
    gauss = coarsen_gaussian(fine_a[:g], fine_b[:g])
    uniform = coarsen_uniform(fine_a[g:], fine_b[g:])
    return _assemble((gauss, uniform))
