"""Constrained and weighted trajectories.

Projected methods keep the first field cell on a manifold f(a) = 0 by
projecting every derivative onto the tangent plane, optionally followed by
a normal projection back onto the surface. Weighted simulations carry a
log-weight as the last component of the first cell; low-weight
trajectories are periodically replaced by copies of the most probable one.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from .exceptions import (
    ConfigurationError,
    DegenerateEnsembleError,
    ProjectionError,
    UnsupportedOperationError,
)
from .stepper import FieldSet, StepContext, check_finite

logger = logging.getLogger(__name__)

PROJECTION_TOLERANCE = 1e-6
PROJECTED_METHODS = ("Enproj", "MPproj", "MPnproj")


@dataclass(frozen=True)
class Manifold:
    """A codimension-one constraint surface in field-component space."""

    kind: str
    q: Optional[np.ndarray] = None
    v: Optional[np.ndarray] = None
    power: int = 2

    def __post_init__(self) -> None:
        if self.kind == "quadratic" and self.q is None:
            raise ConfigurationError("A quadratic manifold needs the qcproj matrix")
        if self.kind == "polynomial" and self.v is None:
            raise ConfigurationError("A polynomial manifold needs the vcproj vector")
        if self.kind not in ("quadratic", "polynomial", "catenoid"):
            raise ConfigurationError(f"Unknown manifold '{self.kind}'")

    @classmethod
    def from_config(
        cls,
        kind: str,
        qcproj: Optional[Sequence[Sequence[float]]] = None,
        vcproj: Optional[Sequence[float]] = None,
        power: int = 2,
    ) -> "Manifold":
        q = None if qcproj is None else np.asarray(qcproj, dtype=float)
        v = None if vcproj is None else np.asarray(vcproj, dtype=float)
        return cls(kind, q, v, power)

    def constraint(self, x: np.ndarray) -> np.ndarray:
        """f(x) for x of shape (components, ...)."""
        x = np.real(x)
        if self.kind == "quadratic":
            return np.einsum("ij,i...,j...->...", self.q, x, x) - 1
        if self.kind == "polynomial":
            v = self.v.reshape((-1,) + (1,) * (x.ndim - 1))
            return np.sum(v * x**self.power, axis=0) - 1
        if x.shape[0] != 3:
            raise ConfigurationError("The catenoid needs exactly three components")
        return x[0] ** 2 + x[1] ** 2 - np.sinh(x[2]) ** 2 - 1

    def gradient(self, x: np.ndarray) -> np.ndarray:
        x = np.real(x)
        if self.kind == "quadratic":
            sym = self.q + self.q.T
            return np.einsum("ij,j...->i...", sym, x)
        if self.kind == "polynomial":
            v = self.v.reshape((-1,) + (1,) * (x.ndim - 1))
            return self.power * v * x ** (self.power - 1)
        return np.stack([2 * x[0], 2 * x[1], -np.sinh(2 * x[2])])


def _unit_normal(manifold: Manifold, x: np.ndarray) -> np.ndarray:
    g = manifold.gradient(x)
    norm = np.sqrt(np.sum(g**2, axis=0, keepdims=True))
    return g / np.where(norm == 0, 1, norm)


def project(
    manifold: Manifold,
    d: Optional[np.ndarray],
    a: np.ndarray,
    option: int,
    iterations: int = 4,
    tolerance: float = PROJECTION_TOLERANCE,
) -> np.ndarray:
    """Projection library entry point.

    option 0: unit normal at a, which defines the tangent plane
    option 1: tangential projection of d at a
    option 2: normal projection of a onto the manifold (d unused)
    option 4: constraint value f(a)
    """
    a = np.asarray(a)
    if option == 0:
        return _unit_normal(manifold, a)
    if option == 1:
        if d is None:
            raise ConfigurationError("Tangential projection needs a vector")
        n = _unit_normal(manifold, a)
        return d - n * np.sum(n * d, axis=0, keepdims=True)
    if option == 2:
        x = np.real(a).astype(float, copy=True)
        for _ in range(iterations):
            g = manifold.gradient(x)
            g2 = np.sum(g**2, axis=0, keepdims=True)
            x = x - manifold.constraint(x)[np.newaxis] * g / np.where(g2 == 0, 1, g2)
        residual = float(np.max(np.abs(manifold.constraint(x)), initial=0.0))
        if not residual <= tolerance:
            raise ProjectionError(
                "Normal projection did not converge",
                {"residual": residual, "iterations": iterations},
            )
        return x.astype(a.dtype) if np.iscomplexobj(a) else x
    if option == 4:
        return manifold.constraint(a)
    raise ConfigurationError(f"Unknown projection option {option}")


def step_projected(
    method: str,
    a: FieldSet,
    w: np.ndarray,
    ctx: StepContext,
    manifold: Manifold,
) -> FieldSet:
    """One step of a tangentially projected method on the first cell."""
    if method not in PROJECTED_METHODS:
        raise ConfigurationError(f"'{method}' is not a projected method")
    if len(a) != 1:
        raise UnsupportedOperationError("Projected methods integrate a single cell")

    def tangent(x: np.ndarray, t: float) -> np.ndarray:
        return project(manifold, ctx.deriv([x], w, t)[0], x, 1)

    x0 = a[0]
    if method == "Enproj":
        x = x0 + ctx.dtr * tangent(x0, ctx.t)
    else:
        half = ctx.dtr / 2
        xi = x0
        for _ in range(ctx.iterations):
            xi = x0 + half * tangent(xi, ctx.t + half)
        x = 2 * xi - x0
    if method in ("Enproj", "MPnproj"):
        x = project(manifold, None, x, 2, ctx.iterations)
    out = [x]
    check_finite(out, ctx.t + ctx.dtr, method)
    return out


@dataclass
class WeightState:
    """Breeding threshold and the fraction bred at the last event."""

    thresholdw: float
    breedw: float = 0.0
    events: int = 0

    def __post_init__(self) -> None:
        if self.thresholdw <= 0:
            raise ConfigurationError("Breeding needs a positive thresholdw")


def log_weights(fields: Sequence[np.ndarray]) -> np.ndarray:
    """Real part of the log-weight of each trajectory."""
    first = fields[0]
    if first.shape[0] < 2:
        raise ConfigurationError("Weighted fields need at least two components")
    omega = first[-1]
    return np.real(omega.reshape(-1, omega.shape[-1])[0])


def trajectory_weights(fields: Sequence[np.ndarray]) -> np.ndarray:
    """exp(Re Omega) normalized to unit mean over the vector ensemble."""
    omega = log_weights(fields)
    shifted = np.exp(omega - np.max(omega))
    return shifted / np.mean(shifted)


def breed(state: WeightState, fields: FieldSet) -> Tuple[WeightState, FieldSet]:
    """Replace low-weight trajectories by halved copies of the heaviest one."""
    # exp(omega) < thresholdw / <exp(omega)>, compared in log space
    omega = log_weights(fields).astype(float, copy=True)
    ensemble = omega.size
    log_mean = logsumexp(omega) - math.log(ensemble)
    cut = math.log(state.thresholdw) - log_mean
    low = np.flatnonzero(omega < cut)
    if low.size == ensemble:
        raise DegenerateEnsembleError(
            "Every trajectory weight is below the breeding threshold",
            {"thresholdw": state.thresholdw, "ensemble": ensemble},
        )
    out = [np.array(x, copy=True) for x in fields]
    ln2 = math.log(2.0)
    for i in low:
        j = int(np.argmax(omega))
        for x in out:
            x[..., i] = x[..., j]
        out[0][-1][..., j] -= ln2
        out[0][-1][..., i] = out[0][-1][..., j]
        omega[j] -= ln2
        omega[i] = omega[j]
    fraction = low.size / ensemble
    if low.size:
        logger.debug(f"Bred {low.size} of {ensemble} trajectories")
    return WeightState(state.thresholdw, fraction, state.events + 1), out

