"""Space-time lattice: coordinate axes, step sizes and momentum grids.

Dimension numbering follows the convention used throughout the package: time
is dimension 1 and transverse space dimensions are 2..d. Field arrays have
shape ``(components, N_2, ..., N_d, ensemble)`` so space dimension ``i`` is
array axis ``i - 1``.
"""

import logging
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .config import GridSpec
from .exceptions import ConfigurationError

logger = logging.getLogger(__name__)

CONVENTIONS = ("propagation-fft", "graphics-centered", "trig")
TRIG_HALF_SHIFT = {"DST1": 0.0, "DCT1": 0.0, "DST2": 0.5, "DST3": 0.5,
                   "DCT2": 0.5, "DCT3": 0.5}


@dataclass(frozen=True)
class Grid:
    """Immutable lattice geometry derived from a GridSpec."""

    dimensions: int
    points: Tuple[int, ...]
    ranges: Tuple[float, ...]
    origins: Tuple[float, ...]
    steps: int
    dx: np.ndarray
    r: Tuple[np.ndarray, ...]
    dk_periodic: np.ndarray
    dk_trig: np.ndarray
    dV: float
    dkV: float
    nspace: int

    @property
    def dt(self) -> float:
        """Output time spacing."""
        return float(self.dx[0])

    @property
    def dtr(self) -> float:
        """Computational time step before any check refinement."""
        return self.dt / self.steps

    @property
    def space_shape(self) -> Tuple[int, ...]:
        return self.points[1:]

    @property
    def times(self) -> np.ndarray:
        return self.r[0]

    def field_shape(self, components: int, ensemble: int) -> Tuple[int, ...]:
        return (components, *self.space_shape, ensemble)

    def axis_view(self, dim: int, values: np.ndarray, trailing: int = 1) -> np.ndarray:
        """Reshape a 1-D axis of space dimension ``dim`` for broadcasting.

        The result has a leading component axis, the space axes and
        ``trailing`` extra singleton axes (the ensemble axis by default).
        """
        shape = [1] * (self.dimensions + trailing)
        shape[dim - 1] = values.size
        return values.reshape(shape)


def build_grid(spec: GridSpec) -> Grid:
    """Construct the lattice for a validated GridSpec."""
    d = spec.dimensions
    for i in range(1, d):
        if spec.points[i] < 2 or spec.ranges[i] <= 0:
            raise ConfigurationError(
                "Space dimensions need a positive range and at least 2 points",
                {"dimension": i + 1},
            )
    points = tuple(int(n) for n in spec.points)
    ranges = tuple(float(r) for r in spec.ranges)
    origins = tuple(float(o) for o in spec.origins)
    dx = np.array([r / (n - 1) for n, r in zip(points, ranges)])
    axes = []
    for n, o, h, rng in zip(points, origins, dx, ranges):
        axis = o + h * np.arange(n)
        axis[-1] = o + rng
        axes.append(axis)
    dk_periodic = np.array([2 * math.pi / (n * h) for n, h in zip(points, dx)])
    dk_trig = np.array([math.pi / ((n - 1) * h) for n, h in zip(points, dx)])
    dV = float(np.prod(dx[1:])) if d > 1 else 1.0
    dkV = float(np.prod(dk_periodic[1:])) if d > 1 else 1.0
    nspace = int(np.prod(points[1:])) if d > 1 else 1
    for arr in (dx, dk_periodic, dk_trig, *axes):
        arr.setflags(write=False)
    grid = Grid(
        dimensions=d,
        points=points,
        ranges=ranges,
        origins=origins,
        steps=spec.steps,
        dx=dx,
        r=tuple(axes),
        dk_periodic=dk_periodic,
        dk_trig=dk_trig,
        dV=dV,
        dkV=dkV,
        nspace=nspace,
    )
    logger.debug(
        f"Built grid: points={points}, ranges={ranges}, dt={grid.dt:.6g}, dV={dV:.6g}"
    )
    return grid


def fft_wavenumbers(n: int, dk: float) -> np.ndarray:
    """Propagation order: 0, positive up to n//2, then the negative half."""
    j = np.arange(n)
    return np.where(j <= n // 2, j, j - n) * dk


def centered_shift(n: int) -> int:
    """Roll that maps propagation order onto ascending graphics order."""
    return (n - 1) // 2


def to_centered(data: np.ndarray, axis: int) -> np.ndarray:
    return np.roll(data, centered_shift(data.shape[axis]), axis=axis)


def momentum_axis(
    grid: Grid, dim: int, convention: str = "propagation-fft", kind: str = "DST1"
) -> np.ndarray:
    """Momentum (or frequency, for dim 1) axis of a lattice dimension.

    ``kind`` only matters for the trig convention, where the half-integer
    shift of the mixed-boundary transforms applies.
    """
    if not 1 <= dim <= grid.dimensions:
        raise ConfigurationError(
            f"Dimension {dim} is outside 1..{grid.dimensions}", {"dimension": dim}
        )
    if convention not in CONVENTIONS:
        raise ConfigurationError(f"Unknown momentum convention '{convention}'")
    n = grid.points[dim - 1]
    if convention == "trig":
        if kind not in TRIG_HALF_SHIFT:
            raise ConfigurationError(f"Unknown transform kind '{kind}'")
        return (np.arange(n) + TRIG_HALF_SHIFT[kind]) * grid.dk_trig[dim - 1]
    k = fft_wavenumbers(n, grid.dk_periodic[dim - 1])
    if convention == "graphics-centered":
        return to_centered(k, 0)
    return k
