"""Interaction-picture machinery: transforms, derivative arrays, propagators.

Periodic dimensions use the FFT. Non-periodic boundary pairs use the
trigonometric transform whose implicit symmetry matches them:

    (Dirichlet, Dirichlet) -> DST1      (Robin, Robin) -> DCT1
    (Dirichlet, Robin)     -> DST3      (Robin, Dirichlet) -> DCT3

Each kind names its forward map and the inverse is its partner (DST3 with
DST2, DCT3 with DCT2; the type-1 maps are their own inverse). All trig maps
carry the symmetric factor sqrt(2/(N-1)) so that forward and inverse compose
to the identity on boundary-consistent data.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.fft as sfft

from .exceptions import ConfigurationError, TransformError, UnsupportedOperationError
from .lattice import Grid, fft_wavenumbers, momentum_axis, to_centered

logger = logging.getLogger(__name__)

TRIG_KINDS = ("DST1", "DCT1", "DST2", "DST3", "DCT2", "DCT3")
PARTNER = {"DST1": "DST1", "DCT1": "DCT1", "DST2": "DST3", "DST3": "DST2",
           "DCT2": "DCT3", "DCT3": "DCT2"}
BOUNDARY_KINDS = {(0, 0): "FFT", (1, 1): "DST1", (-1, -1): "DCT1",
                  (1, -1): "DST3", (-1, 1): "DCT3"}
ODD_TOLERANCE = 1e-12

BoundaryPair = Tuple[int, int]


def transform_kind(pair: Sequence[int]) -> str:
    """Transform used for a (lower, upper) boundary-type pair."""
    key = (int(pair[0]), int(pair[1]))
    if key not in BOUNDARY_KINDS:
        raise ConfigurationError(f"Unsupported boundary pair {key}")
    return BOUNDARY_KINDS[key]


def _span(axis: int, ndim: int, part: slice) -> Tuple[slice, ...]:
    index = [slice(None)] * ndim
    index[axis] = part
    return tuple(index)


def _trig_map(u: np.ndarray, kind: str, axis: int) -> np.ndarray:
    n = u.shape[axis]
    m = n - 1
    c = math.sqrt(2.0 / m) / 2.0
    out = np.zeros(u.shape, dtype=float)
    nd = u.ndim
    if kind == "DST1":
        out[_span(axis, nd, slice(1, m))] = c * sfft.dst(
            u[_span(axis, nd, slice(1, m))], type=1, axis=axis
        )
    elif kind == "DCT1":
        out[...] = c * sfft.dct(u, type=1, axis=axis)
    elif kind == "DST3":
        out[_span(axis, nd, slice(0, m))] = c * sfft.dst(
            u[_span(axis, nd, slice(1, n))], type=3, axis=axis
        )
    elif kind == "DST2":
        out[_span(axis, nd, slice(1, n))] = c * sfft.dst(
            u[_span(axis, nd, slice(0, m))], type=2, axis=axis
        )
    elif kind == "DCT3":
        out[_span(axis, nd, slice(0, m))] = c * sfft.dct(
            u[_span(axis, nd, slice(0, m))], type=3, axis=axis
        )
    else:
        out[_span(axis, nd, slice(0, m))] = c * sfft.dct(
            u[_span(axis, nd, slice(0, m))], type=2, axis=axis
        )
    return out


def trig_transform(
    u: np.ndarray, kind: str, axis: int, direction: str = "forward"
) -> np.ndarray:
    """Apply a normalized trigonometric transform along one array axis.

    Storage keeps all N points of the dimension, endpoints included. For the
    coefficient side, index j holds the mode with wavenumber j*dk (type 1) or
    (j + 1/2)*dk (mixed types); slots with no mode are zero.
    """
    if kind not in TRIG_KINDS:
        raise TransformError(f"Unknown transform kind '{kind}'")
    if direction not in ("forward", "inverse"):
        raise TransformError(f"Unknown transform direction '{direction}'")
    u = np.asarray(u)
    if u.shape[axis] < 3:
        raise TransformError(
            "Trigonometric transforms need at least 3 points",
            {"kind": kind, "points": u.shape[axis]},
        )
    mapped = kind if direction == "forward" else PARTNER[kind]
    if np.iscomplexobj(u):
        return _trig_map(u.real, mapped, axis) + 1j * _trig_map(u.imag, mapped, axis)
    return _trig_map(u, mapped, axis)


def derivative_array(
    grid: Grid, dim: int, order: int, boundary_pair: Sequence[int] = (0, 0)
) -> np.ndarray:
    """Eigenvalues of the order-th derivative along one space dimension."""
    if order < 0:
        raise ConfigurationError("Derivative order must be non-negative")
    n = grid.points[dim - 1]
    if order == 0:
        return np.ones(n, dtype=complex)
    kind = transform_kind(boundary_pair)
    if kind == "FFT":
        k = momentum_axis(grid, dim, "propagation-fft")
        return (1j * k) ** order
    if order % 2:
        raise UnsupportedOperationError(
            "Odd spectral derivatives need periodic boundaries; use finite differences",
            {"dimension": dim, "boundaries": tuple(boundary_pair)},
        )
    k = momentum_axis(grid, dim, "trig", kind)
    return (-(k**2)) ** (order // 2) + 0j


class DerivativeArrays:
    """Derivative operators D{i} handed to linear callbacks.

    ``D.x``, ``D.y``, ``D.z`` alias ``D[2]``, ``D[3]``, ``D[4]``. Each holds
    i*k for its dimension, shaped to broadcast over the space lattice, so
    ``D.x**2`` is the second-derivative eigenvalue -k**2.
    """

    def __init__(self, arrays: Dict[int, Any]):
        self._arrays = arrays

    def __getitem__(self, dim: int) -> Any:
        if dim not in self._arrays:
            raise ConfigurationError(f"No derivative array for dimension {dim}")
        return self._arrays[dim]

    def __getattr__(self, name: str) -> Any:
        aliases = {"x": 2, "y": 3, "z": 4}
        if name in aliases:
            return self[aliases[name]]
        raise AttributeError(name)

    @classmethod
    def for_kinds(cls, grid: Grid, kinds: Sequence[str]) -> "DerivativeArrays":
        arrays: Dict[int, Any] = {}
        nspace = grid.dimensions - 1
        for j, kind in enumerate(kinds):
            dim = j + 2
            if kind == "FFT":
                k = momentum_axis(grid, dim, "propagation-fft")
            else:
                k = momentum_axis(grid, dim, "trig", kind)
            shape = [1] * nspace
            shape[j] = k.size
            arrays[dim] = (1j * k).reshape(shape)
        return cls(arrays)

    @classmethod
    def scalar(cls, dimensions: int, values: Dict[int, complex]) -> "DerivativeArrays":
        return cls({dim: complex(values.get(dim, 0.0)) for dim in range(2, dimensions + 1)})


def _per_component(value: Any, nfields: int, space_shape: Tuple[int, ...]) -> np.ndarray:
    arr = np.asarray(value, dtype=complex)
    try:
        return np.broadcast_to(arr, (nfields, *space_shape))
    except ValueError as e:
        raise ConfigurationError(
            f"Linear operator of shape {arr.shape} does not fit "
            f"{nfields} components on a {space_shape} lattice"
        ) from e


@dataclass
class Propagator:
    """exp(dt*L(k)) per component plus what is needed for boundary lifts."""

    dt: float
    pairs: List[List[BoundaryPair]]
    kinds: List[Tuple[str, ...]]
    factors: Optional[List[np.ndarray]]
    c0: np.ndarray
    c2: np.ndarray

    @property
    def identity(self) -> bool:
        return self.factors is None


def build_propagator(
    grid: Grid,
    linear: Optional[Callable[..., Any]],
    params: Any,
    pairs: List[List[BoundaryPair]],
    dt: float,
) -> Propagator:
    """Evaluate the linear callback on the k-lattice and exponentiate it.

    ``pairs[i][j]`` is the boundary pair of component i in space dimension
    j + 2.
    """
    nfields = len(pairs)
    kinds = [tuple(transform_kind(p) for p in row) for row in pairs]
    nspace = grid.dimensions - 1
    if linear is None:
        return Propagator(dt, pairs, kinds, None, np.zeros(nfields, complex),
                          np.zeros((nfields, nspace), complex))
    space_shape = grid.space_shape
    factors: List[np.ndarray] = []
    cache: Dict[Tuple[str, ...], np.ndarray] = {}
    for i, row in enumerate(kinds):
        if row not in cache:
            D = DerivativeArrays.for_kinds(grid, row)
            cache[row] = _per_component(linear(D, params), nfields, space_shape)
        factors.append(np.exp(dt * cache[row][i]))

    zero = _per_component(linear(DerivativeArrays.scalar(grid.dimensions, {}), params),
                          nfields, ())
    c2 = np.zeros((nfields, nspace), complex)
    for j in range(nspace):
        dim = j + 2
        plus = _per_component(
            linear(DerivativeArrays.scalar(grid.dimensions, {dim: 1j}), params),
            nfields, ())
        minus = _per_component(
            linear(DerivativeArrays.scalar(grid.dimensions, {dim: -1j}), params),
            nfields, ())
        for i in range(nfields):
            odd = abs(plus[i] - minus[i]) > ODD_TOLERANCE * (1 + abs(plus[i]))
            if odd and kinds[i][j] != "FFT":
                raise UnsupportedOperationError(
                    "Non-periodic boundaries only allow even powers of derivatives "
                    "in the linear operator",
                    {"component": i + 1, "dimension": dim},
                )
        c2[:, j] = zero - plus
    logger.debug(f"Built propagator for {nfields} components with dt={dt:.6g}")
    return Propagator(dt, pairs, kinds, factors, np.array(zero), c2)


def _forward(u: np.ndarray, kinds: Sequence[str]) -> np.ndarray:
    if all(k == "FFT" for k in kinds):
        return sfft.fftn(u, axes=range(len(kinds))) if kinds else u
    out = u
    for axis, kind in enumerate(kinds):
        if kind == "FFT":
            out = sfft.fft(out, axis=axis)
        else:
            out = trig_transform(out, kind, axis, "forward")
    return out


def _inverse(u: np.ndarray, kinds: Sequence[str]) -> np.ndarray:
    if all(k == "FFT" for k in kinds):
        return sfft.ifftn(u, axes=range(len(kinds))) if kinds else u
    out = u
    for axis in reversed(range(len(kinds))):
        kind = kinds[axis]
        if kind == "FFT":
            out = sfft.ifft(out, axis=axis)
        else:
            out = trig_transform(out, kind, axis, "inverse")
    return out


def _edge(u: np.ndarray, axis: int, side: int) -> np.ndarray:
    return np.take(u, [0 if side == 0 else -1], axis=axis)


def _lift(
    u: np.ndarray,
    pair: BoundaryPair,
    axis: int,
    grid: Grid,
    values: Optional[np.ndarray],
    c0: complex,
    c2: complex,
    dt: float,
) -> Optional[Tuple[np.ndarray, np.ndarray]]:
    """Polynomial matching the boundary data, and its exact propagation."""
    if values is None:
        lo = _edge(u, axis, 0) if pair[0] == 1 else np.zeros(1)
        hi = _edge(u, axis, 1) if pair[1] == 1 else np.zeros(1)
    else:
        lo = _edge(values, axis, 0)
        hi = _edge(values, axis, 1)
    if not (np.any(lo) or np.any(hi)):
        return None
    dim = axis + 2
    x = grid.r[dim - 1]
    shape = [1] * u.ndim
    shape[axis] = x.size
    s = (x - x[0]).reshape(shape)
    length = grid.ranges[dim - 1]
    curvature: Any = 0.0
    if pair == (1, 1):
        b = lo + (hi - lo) * s / length
    elif pair == (-1, -1):
        b = lo * s + (hi - lo) * s**2 / (2 * length)
        curvature = (hi - lo) / length
    elif pair == (1, -1):
        b = lo + hi * s
    else:
        b = hi + lo * (s - length)
    evolved = np.exp(c0 * dt) * (b + dt * c2 * curvature)
    return b, evolved


def propagate_ip(
    a: np.ndarray,
    prop: Propagator,
    grid: Grid,
    bvals: Optional[Dict[int, np.ndarray]] = None,
    bvals_after: Optional[Dict[int, np.ndarray]] = None,
    lift: bool = True,
) -> np.ndarray:
    """Apply exp(dt*L) to one cell of fields ``(f, space..., ensemble)``.

    With non-periodic boundaries and nonzero boundary data, a low-order
    polynomial matching the data is removed, the remainder is propagated with
    homogeneous boundaries and the exactly propagated polynomial is added
    back. Without ``bvals`` Dirichlet data is read from the field itself and
    Robin data is zero. Dirichlet entries are then set from ``bvals_after``.
    """
    if prop.identity:
        return a
    out = np.empty(a.shape, dtype=complex)
    for i in range(a.shape[0]):
        u = a[i]
        kinds = prop.kinds[i]
        lifted = None
        if lift:
            for j, kind in enumerate(kinds):
                if kind == "FFT":
                    continue
                values = None if bvals is None else bvals[j + 2][i]
                result = _lift(u, tuple(prop.pairs[i][j]), j, grid, values,
                               prop.c0[i], prop.c2[i, j], prop.dt)
                if result is None:
                    continue
                if lifted is not None:
                    raise UnsupportedOperationError(
                        "Nonzero boundary data is supported in one non-periodic "
                        "dimension per component",
                        {"component": i + 1},
                    )
                lifted = result
        if lifted is not None:
            u = u - lifted[0]
        spectrum = _forward(u, kinds) * prop.factors[i][..., np.newaxis]
        u = _inverse(spectrum, kinds)
        if lifted is not None:
            u = u + lifted[1]
        out[i] = u
    if bvals_after is not None:
        impose_dirichlet(out, prop.pairs, bvals_after)
    return out


def impose_dirichlet(
    a: np.ndarray, pairs: List[List[BoundaryPair]], bvals: Dict[int, np.ndarray]
) -> None:
    """Overwrite Dirichlet boundary entries in place."""
    for i, row in enumerate(pairs):
        for j, pair in enumerate(row):
            axis = j + 1
            for side in (0, 1):
                if pair[side] != 1:
                    continue
                index = [slice(None)] * a.ndim
                index[0] = i
                index[axis] = 0 if side == 0 else a.shape[axis] - 1
                value = np.take(bvals[j + 2][i], [side], axis=j)
                a[tuple(index)] = np.squeeze(
                    np.broadcast_to(value, np.take(a[i], [0], axis=j).shape), axis=j
                )


def spectral_derivative(
    a: np.ndarray,
    grid: Grid,
    dim: int,
    order: int,
    pairs: Sequence[BoundaryPair],
) -> np.ndarray:
    """Spectral derivative of fields ``(f, space..., ensemble)`` along ``dim``."""
    axis = dim - 1
    out = np.empty(a.shape, dtype=complex)
    for i in range(a.shape[0]):
        pair = tuple(pairs[i])
        kind = transform_kind(pair)
        eig = derivative_array(grid, dim, order, pair)
        shape = [1] * (a.ndim - 1)
        shape[axis - 1] = eig.size
        if kind == "FFT":
            spec = sfft.fft(a[i], axis=axis - 1) * eig.reshape(shape)
            out[i] = sfft.ifft(spec, axis=axis - 1)
        else:
            spec = trig_transform(a[i], kind, axis - 1) * eig.reshape(shape)
            out[i] = trig_transform(spec, kind, axis - 1, "inverse")
    return out


def fourier_output_transform(
    data: np.ndarray, flags: Sequence[int], grid: Grid, lead: int = 1
) -> np.ndarray:
    """Physics-normalized Fourier transform over flagged space dimensions.

    ``data`` has ``lead`` leading axes, then the space axes. Each flagged
    dimension is transformed with factor dx/sqrt(2*pi) and phase taken from
    the absolute coordinate, then reordered to ascending momentum. The time
    flag (index 0) is handled by ``temporal_transform``.
    """
    out = np.asarray(data)
    for dim in range(2, grid.dimensions + 1):
        if dim - 1 >= len(flags) or not flags[dim - 1]:
            continue
        axis = lead + dim - 2
        n = grid.points[dim - 1]
        k = fft_wavenumbers(n, grid.dk_periodic[dim - 1])
        shape = [1] * out.ndim
        shape[axis] = n
        phase = np.exp(-1j * k * grid.origins[dim - 1]).reshape(shape)
        scaled = grid.dx[dim - 1] / math.sqrt(2 * math.pi) * phase
        out = to_centered(scaled * sfft.fft(out, axis=axis), axis)
    return out


def temporal_transform(
    samples: np.ndarray, dtc: float, t0: float, n_out: int, padded: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Transform samples along axis 0 into the n_out lowest frequencies.

    Samples are taken every ``dtc`` starting at ``t0`` and zero-padded to
    ``padded`` points. A positive exponent sign is used in time. Returns the
    ascending frequency axis and the transformed data.
    """
    if samples.shape[0] > padded:
        raise TransformError("More time samples than the padded transform length")
    spectrum = padded * sfft.ifft(samples, n=padded, axis=0)
    keep = np.r_[0 : n_out // 2 + 1, padded - (n_out - 1) // 2 : padded]
    omega = fft_wavenumbers(n_out, 2 * math.pi / (padded * dtc))
    shape = [n_out] + [1] * (samples.ndim - 1)
    phase = np.exp(1j * omega * t0).reshape(shape)
    out = dtc / math.sqrt(2 * math.pi) * phase * spectrum[keep]
    return to_centered(omega, 0), to_centered(out, 0)
