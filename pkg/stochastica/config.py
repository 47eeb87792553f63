"""Configuration for stochastica simulations.

Two layers live here. ``EngineSettings`` reads process-wide defaults from the
environment (and a ``.env`` file when present). ``GridSpec`` and ``SimConfig``
are validated records describing one simulation in a sequence.
"""

import logging
import os
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Union

from dotenv import load_dotenv
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_validator,
    model_validator,
)

from .exceptions import ConfigurationError

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

METHOD_NAMES = (
    "Euler",
    "Implicit",
    "MP",
    "MPadapt",
    "RK2",
    "RK4",
    "Enproj",
    "MPproj",
    "MPnproj",
)
MANIFOLD_NAMES = ("quadratic", "polynomial", "catenoid")

DEFAULT_POINTS = 51
DEFAULT_SPACE_POINTS = 35
DEFAULT_RANGE = 10.0

Callback = Callable[..., Any]


class EngineSettings:
    """Process-wide settings taken from environment variables."""

    def __init__(self) -> None:
        seed = os.getenv("STOCHASTICA_SEED")
        self.seed_override: Optional[int] = int(seed) if seed else None
        self.log_level = os.getenv("STOCHASTICA_LOG_LEVEL", "INFO")
        self.log_file: Optional[str] = os.getenv("STOCHASTICA_LOG_FILE") or None
        workers = os.getenv("STOCHASTICA_MAX_WORKERS")
        self.max_workers: Optional[int] = int(workers) if workers else None
        self.verbose = int(os.getenv("STOCHASTICA_VERBOSE", "0"))

    def validate(self) -> tuple[bool, Optional[str]]:
        """Validate configuration."""
        if self.log_level.upper() not in logging.getLevelNamesMapping():
            return False, f"STOCHASTICA_LOG_LEVEL '{self.log_level}' is not a level"
        if self.max_workers is not None and self.max_workers < 1:
            return False, "STOCHASTICA_MAX_WORKERS must be at least 1"
        if self.seed_override is not None and self.seed_override < 0:
            return False, "STOCHASTICA_SEED must be non-negative"
        return True, None


def get_settings() -> EngineSettings:
    """Factory function to get the environment settings."""
    return EngineSettings()


class GridSpec(BaseModel):
    """Space-time lattice geometry before derived quantities are computed."""

    model_config = ConfigDict(frozen=True)

    dimensions: int = Field(1, ge=1)
    points: List[int]
    ranges: List[float]
    origins: List[float]
    steps: int = Field(1, ge=1)

    @model_validator(mode="after")
    def _check_lengths(self) -> "GridSpec":
        d = self.dimensions
        if not len(self.points) == len(self.ranges) == len(self.origins) == d:
            raise ValueError(
                "points, ranges and origins must each have one entry per dimension"
            )
        for i, (n, r) in enumerate(zip(self.points, self.ranges), start=1):
            if r <= 0:
                raise ValueError(f"range of dimension {i} must be positive")
            if n < 2:
                raise ValueError(f"dimension {i} needs at least 2 points")
        return self


def _as_list(value: Any) -> Any:
    if value is None:
        return []
    if callable(value):
        return [value]
    return list(value)


class SimConfig(BaseModel):
    """The full parameter record for one simulation in a sequence."""

    model_config = ConfigDict(arbitrary_types_allowed=True, extra="forbid")

    name: str = ""
    dimensions: int = Field(1, ge=1)
    fields: List[int] = Field(default_factory=lambda: [1])
    auxfields: int = Field(0, ge=0)
    points: Optional[List[int]] = None
    ranges: Optional[List[float]] = None
    origins: Optional[List[float]] = None
    steps: int = Field(1, ge=1)

    noises: Optional[int] = Field(None, ge=0)
    knoises: int = Field(0, ge=0)
    unoises: int = Field(0, ge=0)
    inrandoms: Optional[int] = Field(None, ge=0)
    krandoms: Optional[int] = Field(None, ge=0)
    urandoms: int = Field(0, ge=0)
    nfilter: Optional[Callback] = None
    rfilter: Optional[Callback] = None

    ensembles: List[int] = Field(default_factory=lambda: [1, 1, 1])
    method: Optional[str] = None
    iterations: int = Field(4, ge=1)
    order: int = Field(1, ge=-1)
    checks: int = Field(1, ge=0, le=1)
    ipsteps: Optional[int] = Field(None, ge=1)
    seed: int = Field(0, ge=0)
    adapt: float = Field(1.0e6, gt=0)

    initial: List[Optional[Callback]] = Field(default_factory=list)
    deriv: List[Optional[Callback]] = Field(default_factory=list)
    deriv_a: Optional[Callback] = None
    deriv_b: Optional[Callback] = None
    ito: bool = False
    linear: List[Optional[Callback]] = Field(default_factory=list)
    define: Optional[Callback] = None
    transfer: List[Optional[Callback]] = Field(default_factory=list)
    observe: List[Optional[Callback]] = Field(default_factory=list)
    output: List[Optional[Callback]] = Field(default_factory=list)
    compare: List[Optional[Callback]] = Field(default_factory=list)

    transforms: List[List[int]] = Field(default_factory=list)
    binranges: List[Optional[List[Any]]] = Field(default_factory=list)
    scatters: List[int] = Field(default_factory=list)
    averages: Optional[List[int]] = None
    cutoff: float = Field(1.0e-12, ge=0)
    cutoffs: List[Optional[float]] = Field(default_factory=list)
    mincount: float = Field(10.0, ge=0)
    scale: List[float] = Field(default_factory=list)

    boundaries: List[Dict[int, List[List[int]]]] = Field(default_factory=list)
    boundval: List[Dict[int, List[List[float]]]] = Field(default_factory=list)
    boundfun: Optional[Callback] = None

    thresholdw: float = Field(0.0, ge=0)
    manifold: Optional[str] = None
    qcproj: Optional[List[List[float]]] = None
    vcproj: Optional[List[float]] = None
    vcpower: int = Field(2, ge=1)

    relerr: bool = True
    rmserr: bool = True
    diff: bool = True
    rawdata: bool = False
    file: Optional[str] = None
    verbose: int = Field(0, ge=0, le=2)
    olabels: List[str] = Field(default_factory=list)
    constants: Dict[str, Any] = Field(default_factory=dict)

    @field_validator(
        "initial",
        "deriv",
        "linear",
        "transfer",
        "observe",
        "output",
        "compare",
        mode="before",
    )
    @classmethod
    def _wrap_callbacks(cls, value: Any) -> Any:
        return _as_list(value)

    @field_validator("fields", mode="before")
    @classmethod
    def _wrap_fields(cls, value: Any) -> Any:
        if isinstance(value, int):
            return [value]
        return value

    @field_validator("boundaries", "boundval", mode="before")
    @classmethod
    def _wrap_cells(cls, value: Any) -> Any:
        if isinstance(value, Mapping):
            return [dict(value)]
        return value

    @field_validator("ensembles")
    @classmethod
    def _check_ensembles(cls, value: List[int]) -> List[int]:
        if not 1 <= len(value) <= 3:
            raise ValueError("ensembles holds one to three sizes")
        if any(e < 1 for e in value):
            raise ValueError("ensemble sizes must be positive")
        return list(value) + [1] * (3 - len(value))

    @field_validator("method")
    @classmethod
    def _check_method(cls, value: Optional[str]) -> Optional[str]:
        if value is not None and value not in METHOD_NAMES:
            raise ValueError(f"unknown method '{value}'")
        return value

    @field_validator("manifold")
    @classmethod
    def _check_manifold(cls, value: Optional[str]) -> Optional[str]:
        if value is not None and value not in MANIFOLD_NAMES:
            raise ValueError(f"unknown manifold '{value}'")
        return value

    @model_validator(mode="after")
    def _check_shape(self) -> "SimConfig":
        d = self.dimensions
        for key in ("points", "ranges", "origins"):
            value = getattr(self, key)
            if value is not None and len(value) > d:
                raise ValueError(f"{key} has more entries than dimensions")
        if any(f < 1 for f in self.fields):
            raise ValueError("every field cell needs at least one component")
        if self.deriv_b is not None and self.deriv_a is None:
            raise ValueError("deriv_b requires deriv_a")
        if self.thresholdw > 0 and self.fields[0] < 2:
            raise ValueError("weighted simulations need the weight as a second field")
        return self

    # Resolved values

    @property
    def cells(self) -> int:
        return len(self.fields)

    @property
    def noise_count(self) -> int:
        return self.fields[0] if self.noises is None else self.noises

    @property
    def inrandom_count(self) -> int:
        return self.noise_count if self.inrandoms is None else self.inrandoms

    @property
    def krandom_count(self) -> int:
        return self.knoises if self.krandoms is None else self.krandoms

    @property
    def stochastic(self) -> bool:
        return self.noise_count + self.knoises + self.unoises > 0

    @property
    def method_name(self) -> str:
        if self.method is not None:
            return self.method
        return "MP" if self.stochastic else "RK4"

    @property
    def weighted(self) -> bool:
        return self.thresholdw > 0

    @property
    def graphs(self) -> int:
        return max(len(self.observe), len(self.output))

    def grid_spec(self, time_origin: Optional[float] = None) -> GridSpec:
        """Expand default points, ranges and origins to a full GridSpec."""
        d = self.dimensions
        points = list(self.points or [])
        points += [DEFAULT_POINTS if i == 0 else DEFAULT_SPACE_POINTS
                   for i in range(len(points), d)]
        ranges = list(self.ranges or [])
        ranges += [DEFAULT_RANGE] * (d - len(ranges))
        origins = list(self.origins or [])
        origins += [0.0 if i == 0 else -ranges[i] / 2 for i in range(len(origins), d)]
        if time_origin is not None and not self.origins:
            origins[0] = time_origin
        try:
            return GridSpec(
                dimensions=d,
                points=points,
                ranges=ranges,
                origins=origins,
                steps=self.steps,
            )
        except ValidationError as e:
            raise ConfigurationError(f"Invalid grid: {e}") from e

    def boundary_matrix(self, cell: int, dim: int) -> List[List[int]]:
        """Boundary types, one [lower, upper] row per component of a cell."""
        nfields = self.fields[cell]
        rows: Sequence[Sequence[int]] = [[0, 0]]
        if cell < len(self.boundaries):
            rows = self.boundaries[cell].get(dim, rows)
        if len(rows) == 1:
            rows = list(rows) * nfields
        if len(rows) != nfields:
            raise ConfigurationError(
                "Boundary matrix needs one row per field component",
                {"cell": cell, "dimension": dim},
            )
        for lo, hi in rows:
            if lo not in (-1, 0, 1) or hi not in (-1, 0, 1):
                raise ConfigurationError(
                    "Boundary types are -1 (Robin), 0 (periodic) or 1 (Dirichlet)",
                    {"cell": cell, "dimension": dim},
                )
            if (lo == 0) != (hi == 0):
                raise ConfigurationError(
                    "Periodic boundaries can't be combined with other types",
                    {"cell": cell, "dimension": dim},
                )
        return [list(r) for r in rows]

    def static_boundary_values(self, cell: int, dim: int) -> List[List[float]]:
        nfields = self.fields[cell]
        rows: Sequence[Sequence[float]] = [[0.0, 0.0]]
        if cell < len(self.boundval):
            rows = self.boundval[cell].get(dim, rows)
        if len(rows) == 1:
            rows = list(rows) * nfields
        if len(rows) != nfields:
            raise ConfigurationError(
                "Boundary values need one row per field component",
                {"cell": cell, "dimension": dim},
            )
        return [list(r) for r in rows]

    def graph_item(self, items: Sequence[Any], n: int, default: Any = None) -> Any:
        return items[n] if n < len(items) and items[n] is not None else default

    def computed_graphs(self) -> List[int]:
        """Zero-based indices of graphs to compute."""
        if self.averages is None:
            return list(range(self.graphs))
        return [n - 1 for n in self.averages if 1 <= n <= self.graphs]

    def resolved(self) -> Dict[str, Any]:
        """Key/value record of every non-callback parameter, defaults resolved."""
        record: Dict[str, Any] = {}
        for key in type(self).model_fields:
            value = getattr(self, key)
            if callable(value) or (
                isinstance(value, list) and any(callable(v) for v in value)
            ):
                continue
            record[key] = value
        spec = self.grid_spec()
        record.update(
            points=spec.points,
            ranges=spec.ranges,
            origins=spec.origins,
            method=self.method_name,
            noises=self.noise_count,
            inrandoms=self.inrandom_count,
            krandoms=self.krandom_count,
        )
        return record

    def with_overrides(self, overrides: Mapping[str, Any]) -> "SimConfig":
        """Return a validated copy with ``key=value`` overrides applied.

        Strings are parsed: commas separate vector entries and ``key.2``
        addresses the second entry of a list-valued parameter. Keys that are
        not parameters go to ``constants`` if they already exist there or start
        with a capital letter.
        """
        data = {key: getattr(self, key) for key in type(self).model_fields}
        constants = dict(self.constants)
        for raw_key, raw_value in overrides.items():
            key, _, index = raw_key.partition(".")
            value = parse_value(raw_value) if isinstance(raw_value, str) else raw_value
            if key in data and key != "constants":
                if index:
                    current = list(data[key] or [])
                    pos = int(index) - 1
                    if pos < 0:
                        raise ConfigurationError(f"Bad override index in '{raw_key}'")
                    current += [None] * (pos + 1 - len(current))
                    current[pos] = value
                    value = current
                elif key in _LIST_KEYS and not isinstance(value, list):
                    value = [value]
                data[key] = value
            elif key in constants or key[:1].isupper():
                constants[key] = value
            else:
                raise ConfigurationError(f"Unknown override key '{raw_key}'")
        data["constants"] = constants
        return build_config(**data)


_LIST_KEYS = {"points", "ranges", "origins", "ensembles", "fields", "averages"}


def parse_value(text: str) -> Union[int, float, str, bool, List[Any]]:
    """Parse a command-line value: numbers, booleans, or comma-separated lists."""
    text = text.strip()
    if "," in text:
        return [parse_value(part) for part in text.split(",") if part.strip()]
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    for cast in (int, float):
        try:
            return cast(text)
        except ValueError:
            continue
    return text


def build_config(**kwargs: Any) -> SimConfig:
    """Create a SimConfig, turning validation failures into ConfigurationError."""
    try:
        return SimConfig(**kwargs)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid simulation parameters: {e}") from e
