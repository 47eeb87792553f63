"""The parameter object ``p`` handed to every user callback."""

from __future__ import annotations

import copy
import math
from typing import Any, Dict, Optional, Sequence

import numpy as np

from .config import SimConfig
from .findiff import BoundaryValues, d1, d2
from .lattice import Grid, momentum_axis
from .observables import ave, integrate
from .spectral import spectral_derivative


class Params:
    """Lattice, time and constants as seen by initial/deriv/observe callbacks.

    Coordinates are shaped for the field layout ``(f, space..., trailing)``
    where ``trailing`` is 1 for the ensemble axis. User constants from
    ``SimConfig.constants`` are available as attributes.
    """

    def __init__(self, cfg: SimConfig, grid: Grid, trailing: int = 1):
        self.cfg = cfg
        self.grid = grid
        self.name = cfg.name
        self.dimensions = grid.dimensions
        self.ensembles = list(cfg.ensembles)
        self.fields = list(cfg.fields)
        self.trailing = trailing
        self.t = grid.origins[0]
        self.dt = grid.dt
        self.dtr = grid.dtr
        self.dx = np.array(grid.dx)
        self.dk = np.array(grid.dk_periodic)
        self.dk[0] = 2 * math.pi / (grid.points[0] * grid.dt)
        self.dV = grid.dV
        self.dK = grid.dkV
        self.nspace = grid.nspace
        self.w = 0.0
        self.o: Sequence[np.ndarray] = ()
        self.breedw = 0.0
        self.boundinit: Optional[BoundaryValues] = None
        self.boundary = BoundaryValues()
        self._constants: Dict[str, Any] = dict(cfg.constants)
        self._set_axes()

    def _set_axes(self) -> None:
        grid = self.grid
        space = range(2, grid.dimensions + 1)
        self.r = (self.t,) + tuple(
            grid.axis_view(dim, grid.r[dim - 1], self.trailing) for dim in space
        )
        self.k = (self.w,) + tuple(
            grid.axis_view(dim, momentum_axis(grid, dim, "graphics-centered"),
                           self.trailing)
            for dim in space
        )
        self.kprop = (0.0,) + tuple(
            grid.axis_view(dim, momentum_axis(grid, dim, "propagation-fft"),
                           self.trailing)
            for dim in space
        )
        for label, dim in (("x", 2), ("y", 3), ("z", 4)):
            if dim <= grid.dimensions:
                setattr(self, label, self.r[dim - 1])
                setattr(self, "k" + label, self.k[dim - 1])

    def __getattr__(self, name: str) -> Any:
        constants = self.__dict__.get("_constants", {})
        if name in constants:
            return constants[name]
        raise AttributeError(f"Parameter object has no attribute '{name}'")

    def view(self, trailing: Optional[int] = None, **changes: Any) -> "Params":
        """Shallow copy with a different layout or attribute values."""
        clone = copy.copy(self)
        if trailing is not None and trailing != self.trailing:
            clone.trailing = trailing
            clone._set_axes()
        for key, value in changes.items():
            setattr(clone, key, value)
        return clone

    # Library functions

    def pairs(self, cell: int, dim: int) -> list:
        return [tuple(row) for row in self.cfg.boundary_matrix(cell - 1, dim)]

    def d1(self, a: np.ndarray, dim: int = 2, cell: int = 1,
           indices: Optional[Sequence[int]] = None) -> np.ndarray:
        return d1(a, dim, self.grid, self.pairs(cell, dim),
                  self.boundary.get(cell - 1, dim), indices)

    def d2(self, a: np.ndarray, dim: int = 2, cell: int = 1,
           indices: Optional[Sequence[int]] = None) -> np.ndarray:
        return d2(a, dim, self.grid, self.pairs(cell, dim),
                  self.boundary.get(cell - 1, dim), indices)

    def ds(self, a: np.ndarray, order: int = 1, dim: int = 2,
           cell: int = 1) -> np.ndarray:
        arr = np.asarray(a)
        squeezed = arr.ndim == self.grid.dimensions
        if squeezed:
            arr = arr[np.newaxis]
        pairs = self.pairs(cell, dim)
        if len(pairs) != arr.shape[0]:
            pairs = [pairs[0]] * arr.shape[0]
        out = spectral_derivative(arr, self.grid, dim, order, pairs)
        return out[0] if squeezed else out

    def int(self, o: Any, dx: Any = None, bounds: Any = None) -> np.ndarray:
        measure = self.dx if dx is None else dx
        periodic = [
            self.cfg.boundary_matrix(0, dim)[0][0] == 0
            for dim in range(2, self.grid.dimensions + 1)
        ]
        return integrate(o, measure, self.grid, bounds, self.trailing, periodic)

    def ave(self, o: Any, av: Any = None) -> np.ndarray:
        return ave(o, self.grid, av, self.trailing)

    def xint(self, o: Any) -> np.ndarray:
        return self.int(o, self.dx)

    def kint(self, o: Any) -> np.ndarray:
        return integrate(o, self.dk, self.grid, None, self.trailing)
