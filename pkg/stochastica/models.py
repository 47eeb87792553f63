"""Built-in model registry.

Every entry builds one or more SimConfigs with their callbacks attached and
an exact result to compare against, so a run doubles as a check of the
engine. Entries are looked up by name from the command line.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from .config import SimConfig, build_config
from .error_estimates import ErrorVector, max_difference
from .exceptions import ConfigurationError
from .observables import bin_average_density

logger = logging.getLogger(__name__)

EXPECTATIONS = ("comparison", "chi2_per_k", "max_difference")


@dataclass
class ScanSpec:
    """A parameter scan run instead of a single simulation."""

    key: str
    values: List[Any]
    extract: Tuple[int, int, int] = (1, 0, -1)
    compare: Optional[Callable[[Any], float]] = None


@dataclass
class ModelEntry:
    """A named model: a factory for its simulation sequence plus what to expect."""

    name: str
    description: str
    factory: Callable[[], List[SimConfig]]
    expected: Dict[str, Any] = field(default_factory=dict)
    scan: Optional[ScanSpec] = None

    def __post_init__(self) -> None:
        unknown = sorted(set(self.expected) - set(EXPECTATIONS))
        if unknown:
            raise ConfigurationError(
                f"Model '{self.name}' has unknown expectations",
                {"keys": ", ".join(unknown), "known": ", ".join(EXPECTATIONS)},
            )

    def build(self) -> List[SimConfig]:
        return self.factory()

    def check(self, vector: ErrorVector, results: Any) -> List[str]:
        """Expectations a finished run misses, one message each.

        ``comparison`` bounds the relative comparison error of the summary,
        ``chi2_per_k`` is an inclusive (low, high) range and
        ``max_difference`` bounds the largest absolute deviation from any
        comparison function.
        """
        missed: List[str] = []
        limit = self.expected.get("comparison")
        if limit is not None and vector.comparison > limit:
            missed.append(f"comparison error {vector.comparison:.3g} exceeds {limit:g}")
        bounds = self.expected.get("chi2_per_k")
        if bounds is not None:
            low, high = bounds
            if not low <= vector.chi2_per_k <= high:
                missed.append(
                    f"chi2/k {vector.chi2_per_k:.3g} outside [{low:g}, {high:g}]"
                )
        limit = self.expected.get("max_difference")
        if limit is not None:
            worst = max_difference(results)
            if worst > limit:
                missed.append(f"largest difference {worst:.3g} exceeds {limit:g}")
        return missed


def _complex_noise(w: np.ndarray, first: int = 0) -> np.ndarray:
    return w[first : first + 1] + 1j * w[first + 1 : first + 2]


def _sech(x: Any) -> Any:
    return 1.0 / np.cosh(x)


# SDE examples


def wiener() -> List[SimConfig]:
    return [build_config(
        name="Wiener process",
        ensembles=[1000, 10],
        deriv=lambda a, w, p: w,
        observe=[lambda a, p: a, lambda a, p: a * np.conj(a)],
        compare=[lambda p: 0.0 * p.t, lambda p: p.t],
        olabels=["<a>", "<a^2>"],
    )]


def wiener_prob() -> List[SimConfig]:
    edges = np.linspace(-5.0, 5.0, 41)

    def gaussprob(p: Any) -> Any:
        sig = (0.25 + p.t)[..., np.newaxis]
        return bin_average_density(
            lambda x: np.exp(-(x**2) / (2 * sig)) / np.sqrt(2 * math.pi * sig), edges
        )

    return [build_config(
        name="Wiener SDE distribution",
        noises=1,
        points=[10],
        ensembles=[10000, 10],
        initial=lambda v, p: v / 2,
        deriv=lambda a, w, p: w,
        observe=lambda a, p: a,
        binranges=[[edges.tolist()]],
        compare=gaussprob,
        olabels=["P(x)"],
    )]


def kubo() -> List[SimConfig]:
    return [build_config(
        name="Kubo oscillator",
        ensembles=[1000, 8],
        method="MP",
        initial=lambda v, p: 1.0,
        deriv=lambda a, w, p: 1j * w * a,
        observe=[lambda a, p: a, lambda a, p: a**2],
        compare=[lambda p: np.exp(-p.t / 2), lambda p: np.exp(-2 * p.t)],
        olabels=["<a>", "<a^2>"],
    )]


def kubo_xcheck() -> List[SimConfig]:
    return [build_config(
        name="Kubo with convergence checks",
        ensembles=[1000, 10],
        ranges=[2.0],
        initial=lambda v, p: 1.0,
        deriv=lambda a, w, p: 1j * w * a,
        observe=[lambda a, p: np.real(a), lambda a, p: a * np.conj(a)],
        compare=[lambda p: np.exp(-p.t / 2), lambda p: 1.0 + 0.0 * p.t],
        olabels=["<a>", "<|a|^2>"],
    )]


def blackscholes() -> List[SimConfig]:
    # Ito form; the engine converts it for the Stratonovich midpoint method.
    return [build_config(
        name="Black-Scholes",
        ranges=[1.0],
        ensembles=[1000, 10],
        initial=lambda v, p: 1.0,
        deriv_a=lambda a, p: p.MU * a,
        deriv_b=lambda a, p: (p.SIGMA * a)[:, np.newaxis],
        ito=True,
        observe=lambda a, p: a,
        compare=lambda p: np.exp(p.MU * p.t),
        olabels=["<a>"],
        constants={"MU": 0.1, "SIGMA": 1.0},
    )]


def equilibrium() -> List[SimConfig]:
    return [build_config(
        name="Equilibrium spectrum",
        points=[50],
        steps=4,
        ranges=[50.0],
        seed=241,
        noises=2,
        ensembles=[100, 50],
        initial=lambda v, p: _complex_noise(v) / math.sqrt(2),
        deriv=lambda a, w, p: -a + _complex_noise(w),
        observe=[lambda a, p: a * np.conj(a), lambda a, p: a * np.conj(a)],
        transforms=[[0], [1]],
        compare=[
            lambda p: 1.0 + 0.0 * p.t,
            lambda p: p.grid.ranges[0] / (math.pi * (1 + p.w**2)),
        ],
        olabels=["|a(t)|^2", "|a(w)|^2"],
    )]


def gain() -> List[SimConfig]:
    loss = build_config(
        name="Loss with noise",
        ranges=[4.0],
        noises=2,
        ensembles=[10000, 1, 10],
        initial=lambda v, p: _complex_noise(v) / math.sqrt(2),
        deriv=lambda a, w, p: -a + _complex_noise(w),
        observe=lambda a, p: a * np.conj(a),
        compare=lambda p: 1.0 + 0.0 * p.t,
        olabels=["|a|^2"],
    )
    grow = loss.with_overrides({
        "steps": 2,
        "name": "Gain with noise",
        "deriv": lambda a, w, p: a + _complex_noise(w),
        "compare": lambda p: 2 * np.exp(2 * (p.t - 4)) - 1,
    })
    return [loss, grow]


def cellarray() -> List[SimConfig]:
    drive = np.array([[2.0], [1.0]])
    noise = np.array([[1.0], [0.5]])

    def var_b(t: Any) -> Any:
        return 0.25 * (1 - (1 + 2 * t + 2 * t**2) * np.exp(-2 * t))

    return [build_config(
        name="Cell array coupled SDE",
        fields=[2, 1],
        noises=2,
        ensembles=[100, 100],
        initial=[lambda v, p: np.array([[0.0], [2.0]]), lambda v, p: 2.0],
        deriv=[
            lambda a, b, w, p: drive - a + noise * w[:2],
            lambda a, b, w, p: -b + a[0:1],
        ],
        observe=[
            lambda a, b, p: np.concatenate([a, b]),
            lambda a, b, p: np.concatenate([a, b]) ** 2,
        ],
        output=[None, lambda o, p: o[1] - o[0] ** 2],
        compare=[
            lambda p: np.stack([
                2 * (1 - np.exp(-p.t)),
                1 + np.exp(-p.t),
                2 * (1 - p.t * np.exp(-p.t)),
            ]),
            lambda p: np.stack([
                0.5 * (1 - np.exp(-2 * p.t)),
                0.125 * (1 - np.exp(-2 * p.t)),
                var_b(p.t),
            ]),
        ],
        olabels=["<a_i>, <b>", "<da_i^2>, <db^2>"],
    )]


def catenoid() -> List[SimConfig]:
    x0 = np.array([[1.0], [0.0], [0.0]])
    return [build_config(
        name="3D catenoid diffusion",
        fields=[3],
        ranges=[5.0],
        points=[51],
        ensembles=[400, 10],
        method="MPnproj",
        manifold="catenoid",
        initial=lambda v, p: x0,
        deriv=lambda a, w, p: w,
        observe=[None, lambda a, p: np.sum((x0 - a) ** 2, axis=0)],
        output=[lambda o, p: o[1] ** 2, None],
        compare=[None, lambda p: 2 * p.t],
        olabels=["<R^2>^2", "<R^2>"],
    )]


def quantum_oscillator() -> List[SimConfig]:
    def a_in(w: np.ndarray) -> np.ndarray:
        return _complex_noise(w) / 2

    def spectrum(x: np.ndarray, p: Any) -> np.ndarray:
        return (2 * math.pi / p.grid.ranges[0]) * x * np.conj(x)

    return [build_config(
        name="Quantum harmonic oscillator spectrum",
        points=[160],
        steps=4,
        ranges=[120.0],
        fields=[1],
        auxfields=2,
        noises=2,
        ensembles=[400, 1, 12],
        initial=lambda v, p: _complex_noise(v) / 2,
        deriv=lambda a, w, p: -a + math.sqrt(2) * a_in(w),
        define=lambda a, w, p: np.concatenate([a_in(w), math.sqrt(2) * a - a_in(w)]),
        observe=[
            lambda a, x, p: spectrum(a, p),
            lambda a, x, p: spectrum(x[0:1], p),
            lambda a, x, p: spectrum(x[1:2], p),
        ],
        transforms=[[1], [1], [1]],
        compare=[
            lambda p: 1 / (1 + p.w**2),
            lambda p: 0.5 + 0.0 * p.w,
            lambda p: 0.5 + 0.0 * p.w,
        ],
        olabels=["|a(w)|^2", "|a_in(w)|^2", "|a_out(w)|^2"],
    )]


def weightcheck() -> List[SimConfig]:
    return [build_config(
        name="Weightcheck",
        ensembles=[10000, 10, 1],
        fields=[2],
        points=[6],
        order=2,
        thresholdw=0.1,
        initial=lambda v, p: np.concatenate([1 + v[0:1], 0 * v[1:2]]),
        deriv=lambda a, w, p: -a + w[:2],
        observe=[lambda a, p: a[0:1], lambda a, p: p.breedw],
        compare=[lambda p: np.exp(-p.t), None],
        olabels=["<a>", "<fractional breeds per step>"],
    )]


def scanned_diffusion() -> List[SimConfig]:
    return [build_config(
        name="Wiener process, scanned diffusion",
        ensembles=[1000, 10],
        points=[12],
        deriv=lambda a, w, p: w * p.B,
        observe=lambda a, p: a**2,
        olabels=["<a^2>"],
        constants={"B": 1.0},
    )]


# SPDE examples


def nls_soliton() -> List[SimConfig]:
    return [build_config(
        name="NLS soliton",
        dimensions=2,
        points=[51, 64],
        ranges=[10.0, 20.0],
        initial=lambda v, p: _sech(p.x),
        deriv=lambda a, w, p: 1j * a * (np.conj(a) * a),
        linear=lambda D, p: 0.5j * (D.x**2 - 1),
        observe=[
            lambda a, p: a * np.conj(a),
            lambda a, p: np.real(p.xint(a)),
        ],
        compare=[lambda p: _sech(p.x) ** 2, lambda p: math.pi + 0.0 * p.t],
        olabels=["|a|^2", "int a dx"],
    )]


def nls_neumann() -> List[SimConfig]:
    half = 7.5
    return [build_config(
        name="NLS soliton: spectral method + Neumann",
        dimensions=2,
        points=[101, 101],
        ranges=[10.0, 2 * half],
        boundaries=[{2: [[-1, -1]]}],
        initial=lambda v, p: _sech(p.x),
        deriv=lambda a, w, p: 1j * a * (np.conj(a) * a),
        linear=lambda D, p: 0.5j * (D.x**2 - 1),
        observe=[
            lambda a, p: a * np.conj(a),
            lambda a, p: p.xint(np.abs(p.d1(a, 2)) ** 2),
            lambda a, p: p.xint(a * np.conj(a)),
        ],
        compare=[None, None, lambda p: 2 * math.tanh(half) + 0.0 * p.t],
        olabels=["|a|^2", "int |da/dx|^2 dx", "int |a|^2 dx"],
    )]


def _heat_initial(v: Any, p: Any) -> np.ndarray:
    x = p.x
    eps = p.PERIODIC_STRETCH
    return np.concatenate([
        4 * np.sin(x) + np.sin(2 * x),
        5 + 4 * np.cos(x) + np.cos(2 * x),
        4 * np.sin(x / 2) + np.sin(3 * x / 2),
        4 * np.cos(x / 2) + np.cos(3 * x / 2),
        2 + np.cos(2 * x / eps) + np.sin(4 * x / eps),
    ])


def _heat_exact(component: int) -> Callable[[Any], Any]:
    def exact(p: Any) -> Any:
        x, t = p.x, p.t
        eps = p.PERIODIC_STRETCH
        return (
            4 * np.sin(x) * np.exp(-t) + np.sin(2 * x) * np.exp(-4 * t),
            5 + 4 * np.cos(x) * np.exp(-t) + np.cos(2 * x) * np.exp(-4 * t),
            4 * np.sin(x / 2) * np.exp(-t / 4)
            + np.sin(3 * x / 2) * np.exp(-9 * t / 4),
            4 * np.cos(x / 2) * np.exp(-t / 4)
            + np.cos(3 * x / 2) * np.exp(-9 * t / 4),
            2 + np.cos(2 * x / eps) * np.exp(-4 * t / eps**2)
            + np.sin(4 * x / eps) * np.exp(-16 * t / eps**2),
        )[component]

    return exact


def _heat_base(**changes: Any) -> SimConfig:
    points = 51
    settings: Dict[str, Any] = dict(
        name="Heat test, spectral",
        dimensions=2,
        points=[51, points],
        order=0,
        method="MP",
        fields=[5],
        ranges=[4.0, math.pi],
        origins=[0.0, 0.0],
        initial=_heat_initial,
        boundaries=[{2: [[1, 1], [-1, -1], [1, -1], [-1, 1], [0, 0]]}],
        observe=[(lambda i: lambda a, p: a[i : i + 1])(i) for i in range(5)],
        compare=[_heat_exact(i) for i in range(5)],
        olabels=["a, DD", "a, NN", "a, DN", "a, ND", "a, PP"],
        # periodic images sit one lattice spacing beyond the last point
        constants={"PERIODIC_STRETCH": points / (points - 1)},
    )
    settings.update(changes)
    return build_config(**settings)


def heat_boundaries() -> List[SimConfig]:
    return [_heat_base(linear=lambda D, p: D.x**2)]


def heat_fd() -> List[SimConfig]:
    return [_heat_base(
        name="Heat test, finite differences",
        steps=40,
        deriv=lambda a, w, p: p.d2(a, 2),
    )]


def heat_sequence() -> List[SimConfig]:
    spectral = heat_boundaries()[0]
    fd = _heat_base(
        name="Heat test, finite differences",
        steps=40,
        deriv=lambda a, w, p: p.d2(a, 2),
        transfer=lambda v, a, p: _heat_initial(v, p),
    )
    return [spectral, fd]


def planar() -> List[SimConfig]:
    def initial(v: np.ndarray, p: Any) -> np.ndarray:
        return np.concatenate([_complex_noise(v, 0), _complex_noise(v, 2)]) / math.sqrt(2)

    def deriv(a: np.ndarray, w: np.ndarray, p: Any) -> np.ndarray:
        return np.concatenate([_complex_noise(w, 0), _complex_noise(w, 2)]) / math.sqrt(2)

    return [build_config(
        name="Planar noise growth",
        dimensions=3,
        fields=[2],
        ranges=[1.0, 5.0, 5.0],
        points=[10, 35, 35],
        noises=2,
        knoises=2,
        inrandoms=2,
        krandoms=2,
        ensembles=[10, 2, 12],
        initial=initial,
        deriv=deriv,
        linear=lambda D, p: 0.5j * (D.x**2 + D.y**2),
        observe=[
            lambda a, p: p.xint(a[0:1] * np.conj(a[0:1])),
            lambda a, p: p.kint(a[1:2] * np.conj(a[1:2])),
            lambda a, p: np.real(p.ave(a[0:1] * np.conj(a[1:2]))),
            lambda a, p: a[1:2] * np.conj(a[1:2]),
        ],
        transforms=[[0, 0, 0], [0, 1, 1], [0, 1, 1], [0, 0, 0]],
        compare=[
            lambda p: (1 + p.t) * p.nspace,
            lambda p: (1 + p.t) * p.nspace,
            lambda p: 0.0 * p.t,
            lambda p: (1 + p.t) / p.dV,
        ],
        olabels=["<int |a_1(x)|^2 dx>", "<int |a_2(k)|^2 dk>",
                 "<<a_1(k) a_2*(k)>>", "<|a_2(x)|^2>"],
    )]


def gaussian() -> List[SimConfig]:
    c = 0.05

    def exact(p: Any) -> Any:
        spread = 1 + (2 * c * p.t) ** 2
        r2 = p.x**2 + p.y**2 + p.z**2
        return np.exp(-r2 / spread) / spread**1.5

    return [build_config(
        name="Gaussian diffraction",
        dimensions=4,
        points=[11, 32, 32, 32],
        initial=lambda v, p: np.exp(-0.5 * (p.x**2 + p.y**2 + p.z**2)),
        linear=lambda D, p: 1j * c * (D.x**2 + D.y**2 + D.z**2),
        observe=lambda a, p: a * np.conj(a),
        compare=exact,
        olabels=["|a(t,x)|^2"],
    )]


def gpe_vortex() -> List[SimConfig]:
    g = 200.0
    om = 0.6

    def potential(p: Any) -> Any:
        return 0.35 * (p.x**2 + p.y**2)

    def rotation(a: np.ndarray, p: Any) -> np.ndarray:
        return 1j * (p.x * p.d1(a, 3) - p.y * p.d1(a, 2))

    def normalized_deriv(a: np.ndarray, w: np.ndarray, p: Any) -> np.ndarray:
        da = -a * (potential(p) + g * np.conj(a) * a) + om * rotation(a, p)
        b = a + da * p.dtr
        norm = np.sqrt(np.real(p.xint(np.abs(b) ** 2)))
        return (b / norm - a) / p.dtr

    return [build_config(
        name="GPE vortex 2D",
        dimensions=3,
        fields=[1],
        points=[50, 40, 40],
        ranges=[15.0, 16.0, 16.0],
        steps=15,
        initial=lambda v, p: 0.1 * np.exp(-potential(p)),
        deriv=normalized_deriv,
        linear=lambda D, p: 0.5 * (D.x**2 + D.y**2),
        observe=[lambda a, p: a * np.conj(a), lambda a, p: p.xint(a * np.conj(a))],
        olabels=["|a|^2", "int |a|^2 dx"],
    )]


def characteristic() -> List[SimConfig]:
    def exact(p: Any) -> Any:
        # periodic images of the travelling pulse
        period = p.grid.points[1] * p.dx[1]
        return sum(_sech(2 * (p.x - p.t + 2.5 + m * period)) for m in (-2, -1, 0, 1))

    return [build_config(
        name="Characteristic",
        dimensions=2,
        initial=lambda v, p: _sech(2 * (p.x + 2.5)),
        linear=lambda D, p: -D.x,
        observe=lambda a, p: a,
        compare=exact,
        olabels=["a(x)"],
    )]


def _peregrine(x: Any, t: Any) -> Tuple[Any, Any]:
    phase = np.exp(1j * t)
    denom = 1 + 4 * (t**2 + x**2)
    value = phase * (4 * (1 + 2j * t) / denom - 1)
    slope = -8 * x * phase * (4 * (1 + 2j * t) / denom**2)
    return value, slope


def peregrine() -> List[SimConfig]:
    def boundfun(a: np.ndarray, cell: int, dim: int, p: Any) -> np.ndarray:
        value, slope = _peregrine(p.grid.origins[1], p.t)
        rows = [[value, value], [slope, -slope], [value, -slope], [slope, value]]
        return np.array(rows, dtype=complex)[:, :, np.newaxis]

    def intensity(p: Any) -> Any:
        return np.abs(_peregrine(p.x, p.t)[0]) ** 2

    return [build_config(
        name="Peregrine solution",
        dimensions=2,
        fields=[4],
        order=2,
        ranges=[10.0, 10.0],
        origins=[-5.0, -5.0],
        points=[51, 161],
        steps=20,
        method="MP",
        boundaries=[{2: [[1, 1], [-1, -1], [1, -1], [-1, 1]]}],
        boundfun=boundfun,
        initial=lambda v, p: _peregrine(p.x, p.t)[0] + np.zeros((4, 1, 1)),
        deriv=lambda a, w, p: 1j * a * (np.conj(a) * a),
        linear=lambda D, p: 0.5j * D.x**2,
        observe=[(lambda i: lambda a, p: np.abs(a[i : i + 1]) ** 2)(i)
                 for i in range(4)],
        compare=[intensity] * 4,
        olabels=["|a|^2, DD", "|a|^2, NN", "|a|^2, DN", "|a|^2, ND"],
    )]


MODELS: Dict[str, ModelEntry] = {
    entry.name: entry
    for entry in (
        ModelEntry("wiener", "Wiener process: <a^2> = t", wiener,
                   {"comparison": 0.05, "chi2_per_k": (0.1, 4.0)}),
        ModelEntry("wiener_prob", "Wiener density vs Gaussian with variance 1/4 + t",
                   wiener_prob, {"chi2_per_k": (0.2, 4.0)}),
        ModelEntry("kubo", "Kubo oscillator: <a^n> = exp(-n^2 t/2)", kubo,
                   {"comparison": 0.05, "chi2_per_k": (0.1, 4.0)}),
        ModelEntry("kubo_xcheck", "Kubo oscillator for convergence checks",
                   kubo_xcheck, {"comparison": 0.05}),
        ModelEntry("blackscholes", "Black-Scholes stock price: <a> = exp(mu t)",
                   blackscholes, {"comparison": 0.05, "chi2_per_k": (0.1, 4.0)}),
        ModelEntry("equilibrium", "Ornstein-Uhlenbeck equilibrium spectrum",
                   equilibrium, {"chi2_per_k": (0.1, 5.0)}),
        ModelEntry("gain", "Loss then gain with noise, a two-stage sequence", gain,
                   {"comparison": 0.03}),
        ModelEntry("cellarray", "Coupled vector and scalar SDE cells", cellarray,
                   {"comparison": 0.02}),
        ModelEntry("catenoid", "Projected diffusion on a catenoid: <R^2> = 2t",
                   catenoid, {"comparison": 0.1}),
        ModelEntry("quantum_oscillator", "Damped quantum oscillator input-output spectra",
                   quantum_oscillator, {"chi2_per_k": (0.1, 5.0)}),
        ModelEntry("weightcheck", "Weighted trajectories with breeding", weightcheck,
                   {"comparison": 0.03}),
        ModelEntry(
            "scanned_diffusion", "Variance at t=10 scanned against D = B^2",
            scanned_diffusion, {},
            ScanSpec("B", [math.sqrt(j * 0.1) for j in range(25)], (1, 0, -1),
                     lambda b: 10.0 * b**2),
        ),
        ModelEntry("nls_soliton", "Periodic NLS soliton, a = sech(x)", nls_soliton,
                   {"max_difference": 2e-3}),
        ModelEntry("nls_neumann", "NLS soliton with Neumann boundaries", nls_neumann,
                   {"max_difference": 1e-3}),
        ModelEntry("heat_boundaries", "Heat equation with DD, NN, DN, ND, PP boundaries",
                   heat_boundaries, {"max_difference": 1e-8}),
        ModelEntry("heat_fd", "Heat equation by finite differences", heat_fd,
                   {"max_difference": 5e-3}),
        ModelEntry("heat_sequence", "Spectral then finite-difference heat equation",
                   heat_sequence, {"max_difference": 5e-3}),
        ModelEntry("planar", "Planar noise growth in x and k space", planar,
                   {"comparison": 0.06}),
        ModelEntry("gaussian", "Gaussian diffraction in three space dimensions",
                   gaussian, {"max_difference": 1e-3}),
        ModelEntry("gpe_vortex", "Gross-Pitaevskii vortex formation", gpe_vortex),
        ModelEntry("characteristic", "Travelling pulse with periodic wrap",
                   characteristic),
        ModelEntry("peregrine", "Peregrine wave with time-dependent boundaries",
                   peregrine),
    )
}


def get_model(name: str) -> ModelEntry:
    """Look up a registered model by name."""
    try:
        return MODELS[name]
    except KeyError:
        raise ConfigurationError(
            f"Unknown model '{name}'", {"available": ", ".join(sorted(MODELS))}
        ) from None


def list_models() -> List[ModelEntry]:
    return [MODELS[name] for name in sorted(MODELS)]
