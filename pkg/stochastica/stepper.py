"""Interaction-picture time steps.

Each method advances a FieldSet (a list of per-cell arrays) by one
computational step ``dtr``. The linear part is applied through
``StepContext.propagate`` and the nonlinear and stochastic part through
``StepContext.deriv``; the noise of the step is held fixed across all
stages of a method.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from .exceptions import ConfigurationError, DivergenceError

logger = logging.getLogger(__name__)

FieldSet = List[np.ndarray]
DerivFn = Callable[[FieldSet, np.ndarray, float], FieldSet]
PropagateFn = Callable[[FieldSet, float, bool], FieldSet]

FD_STEP = 1e-6


@dataclass(frozen=True)
class MethodInfo:
    """Attributes of an integration method."""

    name: str
    ipsteps: int
    order: int
    calculus: str
    projected: bool = False


METHODS: Dict[str, MethodInfo] = {
    "Euler": MethodInfo("Euler", 1, 1, "Ito"),
    "Implicit": MethodInfo("Implicit", 1, 1, "backward-Ito"),
    "MP": MethodInfo("MP", 2, 2, "Stratonovich"),
    "MPadapt": MethodInfo("MPadapt", 2, 2, "Stratonovich"),
    "RK2": MethodInfo("RK2", 1, 2, "Stratonovich"),
    "RK4": MethodInfo("RK4", 2, 4, "Stratonovich"),
    "Enproj": MethodInfo("Enproj", 1, 1, "Ito", projected=True),
    "MPproj": MethodInfo("MPproj", 2, 2, "Stratonovich", projected=True),
    "MPnproj": MethodInfo("MPnproj", 2, 2, "Stratonovich", projected=True),
}


def method_info(name: str) -> MethodInfo:
    if name not in METHODS:
        raise ConfigurationError(f"Unknown integration method '{name}'")
    return METHODS[name]


@dataclass
class StepContext:
    """Everything a method needs for one step besides the fields and noise.

    ``propagate(a, t, lift)`` applies the interaction-picture propagator of
    length ``dtr / ipsteps`` starting at time t. ``deriv(a, w, t)`` returns
    the derivative of every cell.
    """

    t: float
    dtr: float
    propagate: PropagateFn
    deriv: DerivFn
    iterations: int = 4
    adapt: float = 1.0e6

    def __post_init__(self) -> None:
        if self.iterations < 1:
            raise ConfigurationError("At least one iteration is required")
        if self.dtr <= 0:
            raise ConfigurationError("Time step must be positive")


def _axpy(a: FieldSet, scale: float, d: FieldSet) -> FieldSet:
    return [x + scale * y for x, y in zip(a, d)]


def _euler(a: FieldSet, w: np.ndarray, ctx: StepContext) -> FieldSet:
    d = ctx.deriv(a, w, ctx.t)
    return ctx.propagate(_axpy(a, ctx.dtr, d), ctx.t, True)


def _implicit(a: FieldSet, w: np.ndarray, ctx: StepContext) -> FieldSet:
    t1 = ctx.t + ctx.dtr
    a0 = ctx.propagate(a, ctx.t, True)
    ai = a0
    for _ in range(ctx.iterations):
        ai = _axpy(a0, ctx.dtr, ctx.deriv(ai, w, t1))
    return ai


def _midpoint(a: FieldSet, w: np.ndarray, ctx: StepContext) -> FieldSet:
    half = ctx.dtr / 2
    tm = ctx.t + half
    a0 = ctx.propagate(a, ctx.t, True)
    ai = a0
    for _ in range(ctx.iterations):
        ai = _axpy(a0, half, ctx.deriv(ai, w, tm))
    return ctx.propagate([2 * x - y for x, y in zip(ai, a0)], tm, True)


def adapt_switch(a: FieldSet, threshold: float) -> List[np.ndarray]:
    """Per-element power: -1 where |a|^2 exceeds the threshold, else +1."""
    if threshold <= 0:
        raise ConfigurationError("Adaptive threshold must be positive")
    return [np.where(np.abs(x) ** 2 > threshold, -1, 1) for x in a]


def adapt_transform(
    a: Any, direction: str = "forward", threshold: float = 1.0e6
) -> np.ndarray:
    """Invert elements above threshold (forward) or apply a stored switch.

    ``direction="forward"`` maps a -> a**p with p chosen from |a|^2;
    ``direction="inverse"`` is the same map, since a**(-1) is an
    involution, and is kept for symmetry at call sites.
    """
    if direction not in ("forward", "inverse"):
        raise ConfigurationError(f"Unknown adaptive direction '{direction}'")
    x = np.asarray(a)
    if threshold <= 0:
        raise ConfigurationError("Adaptive threshold must be positive")
    p = np.where(np.abs(x) ** 2 > threshold, -1, 1)
    return _power(x, p)


def _power(x: np.ndarray, p: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(p < 0, 1 / np.where(x == 0, np.inf, x), x)


def _midpoint_adaptive(a: FieldSet, w: np.ndarray, ctx: StepContext) -> FieldSet:
    half = ctx.dtr / 2
    tm = ctx.t + half
    p = adapt_switch(a, ctx.adapt)
    inverted = [_power(x, s) for x, s in zip(ctx.propagate(a, ctx.t, True), p)]
    ai = inverted
    for _ in range(ctx.iterations):
        d = ctx.deriv([_power(x, s) for x, s in zip(ai, p)], w, tm)
        # d(a^p)/dt = p a^(p-1) da/dt, written in terms of the inverted field
        ai = [
            x0 + half * np.where(s < 0, -(x**2), 1) * dx
            for x0, x, s, dx in zip(inverted, ai, p, d)
        ]
    mid = [_power(2 * x - x0, s) for x, x0, s in zip(ai, inverted, p)]
    return ctx.propagate(mid, tm, True)


def _rk2(a: FieldSet, w: np.ndarray, ctx: StepContext) -> FieldSet:
    t1 = ctx.t + ctx.dtr
    abar = ctx.propagate(a, ctx.t, True)
    a1 = ctx.propagate(_axpy(a, ctx.dtr, ctx.deriv(a, w, ctx.t)), ctx.t, True)
    a2 = _axpy(abar, ctx.dtr, ctx.deriv(a1, w, t1))
    return [(x + y) / 2 for x, y in zip(a1, a2)]


def _rk4(a: FieldSet, w: np.ndarray, ctx: StepContext) -> FieldSet:
    half = ctx.dtr / 2
    tm = ctx.t + half
    abar = ctx.propagate(a, ctx.t, True)
    d1 = [half * x for x in ctx.propagate(ctx.deriv(a, w, ctx.t), ctx.t, False)]
    d2 = [half * x for x in ctx.deriv(_axpy(abar, 1, d1), w, tm)]
    d3 = [half * x for x in ctx.deriv(_axpy(abar, 1, d2), w, tm)]
    a4 = ctx.propagate(_axpy(abar, 2, d3), tm, True)
    d4 = [half * x for x in ctx.deriv(a4, w, ctx.t + ctx.dtr)]
    inner = [
        x + (y1 + 2 * (y2 + y3)) / 3 for x, y1, y2, y3 in zip(abar, d1, d2, d3)
    ]
    return [x + y / 3 for x, y in zip(ctx.propagate(inner, tm, True), d4)]


_UPDATES: Dict[str, Callable[[FieldSet, np.ndarray, StepContext], FieldSet]] = {
    "Euler": _euler,
    "Implicit": _implicit,
    "MP": _midpoint,
    "MPadapt": _midpoint_adaptive,
    "RK2": _rk2,
    "RK4": _rk4,
}


def check_finite(a: Sequence[np.ndarray], t: float, method: str) -> None:
    if not all(np.all(np.isfinite(x)) for x in a):
        raise DivergenceError("Field values are no longer finite", t, method)


def step(method: str, a: FieldSet, w: np.ndarray, ctx: StepContext) -> FieldSet:
    """Advance the fields by one computational step with the named method."""
    if method not in _UPDATES:
        if method in METHODS:
            raise ConfigurationError(
                f"Method '{method}' needs a manifold; use advanced.step_projected"
            )
        raise ConfigurationError(f"Unknown integration method '{method}'")
    out = _UPDATES[method](list(a), w, ctx)
    check_finite(out, ctx.t + ctx.dtr, method)
    return out


def ito_stratonovich_drift_shift(
    B: Callable[..., Any], a: np.ndarray, p: Any = None, h: float = FD_STEP
) -> np.ndarray:
    """Drift difference between the Ito and Stratonovich forms.

    ``B(a, p)`` returns the noise matrix with shape (f, noises, ...) for
    fields of shape (f, ...). The result is 0.5 * sum_jk B_jk dB_ik/da_j,
    with the derivative taken by central differences. A model in Ito form
    with drift A runs on a Stratonovich method with drift A minus this.
    """
    a = np.asarray(a)
    b0 = np.asarray(B(a, p))
    if b0.shape[0] != a.shape[0]:
        raise ConfigurationError(
            f"Noise matrix of shape {b0.shape} does not match {a.shape[0]} fields"
        )
    shift = np.zeros(a.shape, dtype=np.result_type(a, b0, float))
    for j in range(a.shape[0]):
        up = a.astype(shift.dtype, copy=True)
        down = a.astype(shift.dtype, copy=True)
        up[j] += h
        down[j] -= h
        dB = (np.asarray(B(up, p)) - np.asarray(B(down, p))) / (2 * h)
        shift += 0.5 * np.sum(b0[j][np.newaxis] * dB, axis=1)
    return shift
