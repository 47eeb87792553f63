"""Result data and its self-describing file format.

A result file is a short text preamble, a JSON header describing every
array (shape, dtype, offset) together with the resolved parameters of each
simulation, and a binary payload of little-endian arrays. The header
records a SHA-256 checksum of the payload. Run time is not stored, so
the same configuration and seed always give the same file.
"""

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import GridSpec
from .error_estimates import NPLANES, ErrorPlanes, ErrorVector, FitStatistic
from .exceptions import ChecksumError, ConfigurationError, ResultFileError
from .lattice import Grid, build_grid

logger = logging.getLogger(__name__)

MAGIC = b"STOCHASTICA-RESULTS"
FORMAT_VERSION = 1
PLANE_LABELS = ("mean", "step", "sampling", "compare", "compare_sys", "compare_stat")


@dataclass
class ResultData:
    """Everything a run produced.

    ``data[s][n]`` holds the planes of graph n of sequence member s (None
    for graphs that were not computed). ``raw`` maps (sequence, pass,
    ensemble member) to the final fields when raw capture is on.
    """

    data: List[List[Optional[ErrorPlanes]]]
    grids: List[Grid]
    configs: List[Dict[str, Any]]
    raw: Dict[Tuple[int, int, int], List[np.ndarray]] = field(default_factory=dict)
    error: Optional[ErrorVector] = None

    def graph(self, n: int, sequence: int = 1) -> ErrorPlanes:
        """Planes of graph n (1-based) in sequence member ``sequence`` (1-based)."""
        if not 1 <= sequence <= len(self.data):
            raise ConfigurationError(f"No sequence member {sequence}")
        graphs = self.data[sequence - 1]
        if not 1 <= n <= len(graphs) or graphs[n - 1] is None:
            raise ConfigurationError(f"Graph {n} was not computed",
                                     {"sequence": sequence})
        return graphs[n - 1]


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, complex):
        return [value.real, value.imag]
    if callable(value):
        # repr would embed a memory address
        return getattr(value, "__qualname__", type(value).__name__)
    return repr(value)


class _PayloadWriter:
    def __init__(self) -> None:
        self.chunks: List[bytes] = []
        self.offset = 0

    def add(self, array: np.ndarray) -> Dict[str, Any]:
        arr = np.asarray(array)
        dtype = "<c16" if np.iscomplexobj(arr) else "<f8"
        data = np.ascontiguousarray(arr, dtype=dtype).tobytes()
        desc = {"offset": self.offset, "shape": list(arr.shape), "dtype": dtype}
        self.chunks.append(data)
        self.offset += len(data)
        return desc

    @property
    def payload(self) -> bytes:
        return b"".join(self.chunks)


def _grid_record(grid: Grid) -> Dict[str, Any]:
    return {
        "dimensions": grid.dimensions,
        "points": list(grid.points),
        "ranges": list(grid.ranges),
        "origins": list(grid.origins),
        "steps": grid.steps,
    }


def write_results(path: Union[str, Path], results: ResultData) -> Path:
    """Write a result file; the same data always gives the same bytes."""
    writer = _PayloadWriter()
    sequences = []
    for s, graphs in enumerate(results.data):
        graph_records: List[Optional[Dict[str, Any]]] = []
        for planes in graphs:
            if planes is None:
                graph_records.append(None)
                continue
            graph_records.append({
                "values": writer.add(planes.values),
                "available": list(planes.available),
                "scatter": planes.scatter,
                "axes": [writer.add(a) for a in planes.axes],
                "axis_names": list(planes.axis_names),
                "chi2": None if planes.chi2 is None else [
                    planes.chi2.value, planes.chi2.k, planes.chi2.excluded],
            })
        raw_records = [
            {"pass": p, "member": m, "cells": [writer.add(c) for c in cells]}
            for (seq, p, m), cells in sorted(results.raw.items())
            if seq == s
        ]
        sequences.append({
            "config": results.configs[s] if s < len(results.configs) else {},
            "grid": _grid_record(results.grids[s]),
            "graphs": graph_records,
            "raw": raw_records,
        })
    payload = writer.payload
    error = results.error
    header = {
        "version": FORMAT_VERSION,
        "checksum": hashlib.sha256(payload).hexdigest(),
        "error": None if error is None else {
            "vector": error.scores(), "report": error.report},
        "sequences": sequences,
    }
    text = json.dumps(header, default=_jsonable, sort_keys=True).encode("utf-8")
    target = Path(path)
    try:
        with open(target, "wb") as f:
            f.write(MAGIC + b"\n")
            f.write(f"version {FORMAT_VERSION}\n".encode("ascii"))
            f.write(f"header {len(text)}\n".encode("ascii"))
            f.write(text + b"\n")
            f.write(payload)
    except OSError as e:
        raise ResultFileError(f"Could not write results: {e}", {"path": str(target)}) from e
    logger.info(f"Wrote results to {target} ({len(payload)} payload bytes)")
    return target


def _array(payload: bytes, desc: Dict[str, Any]) -> np.ndarray:
    count = int(np.prod(desc["shape"])) if desc["shape"] else 1
    arr = np.frombuffer(payload, dtype=desc["dtype"], count=count, offset=desc["offset"])
    return arr.reshape(desc["shape"]).copy()


def read_results(path: Union[str, Path]) -> ResultData:
    """Read a result file, checking its version and payload checksum."""
    source = Path(path)
    try:
        with open(source, "rb") as f:
            magic = f.readline().rstrip(b"\n")
            version_line = f.readline().decode("ascii").split()
            header_line = f.readline().decode("ascii").split()
            if magic != MAGIC or len(version_line) != 2 or len(header_line) != 2:
                raise ResultFileError("Not a stochastica result file",
                                      {"path": str(source)})
            if int(version_line[1]) != FORMAT_VERSION:
                raise ResultFileError(
                    f"Unsupported result file version {version_line[1]}",
                    {"path": str(source)},
                )
            header = json.loads(f.read(int(header_line[1])).decode("utf-8"))
            f.read(1)
            payload = f.read()
    except (OSError, UnicodeDecodeError, ValueError) as e:
        raise ResultFileError(f"Could not read results: {e}", {"path": str(source)}) from e
    if hashlib.sha256(payload).hexdigest() != header["checksum"]:
        raise ChecksumError("Result payload does not match its checksum",
                            {"path": str(source)})
    data: List[List[Optional[ErrorPlanes]]] = []
    grids: List[Grid] = []
    configs: List[Dict[str, Any]] = []
    raw: Dict[Tuple[int, int, int], List[np.ndarray]] = {}
    for s, record in enumerate(header["sequences"]):
        configs.append(record["config"])
        grids.append(build_grid(GridSpec(**record["grid"])))
        graphs: List[Optional[ErrorPlanes]] = []
        for g in record["graphs"]:
            if g is None:
                graphs.append(None)
                continue
            chi2 = None if g["chi2"] is None else FitStatistic(
                g["chi2"][0], int(g["chi2"][1]), int(g["chi2"][2]))
            graphs.append(ErrorPlanes(
                values=_array(payload, g["values"]),
                available=tuple(bool(a) for a in g["available"]),
                chi2=chi2,
                scatter=bool(g["scatter"]),
                axes=[_array(payload, a) for a in g["axes"]],
                axis_names=list(g["axis_names"]),
            ))
        data.append(graphs)
        for r in record["raw"]:
            raw[(s, r["pass"], r["member"])] = [_array(payload, c) for c in r["cells"]]
    error = None
    if header["error"] is not None:
        scores = header["error"]["vector"]
        error = ErrorVector(*scores, report=header["error"]["report"])
    return ResultData(data, grids, configs, raw, error)


def parse_axis_spec(spec: str, n: int) -> np.ndarray:
    """Indices selected on an axis of length n.

    ``0`` selects all points, ``-1`` the midpoint and ``-2`` the last
    point; a positive integer selects that point (1-based) and ``a:b:s``
    a 1-based inclusive range.
    """
    spec = spec.strip()
    try:
        if ":" in spec:
            parts = [int(x) for x in spec.split(":")]
            start, stop = parts[0], parts[1]
            stride = parts[2] if len(parts) > 2 else 1
            idx = np.arange(start - 1, stop, stride)
        else:
            value = int(spec)
            if value == 0:
                idx = np.arange(n)
            elif value == -1:
                idx = np.array([n // 2])
            elif value == -2:
                idx = np.array([n - 1])
            elif value > 0:
                idx = np.array([value - 1])
            else:
                raise ValueError(spec)
    except ValueError as e:
        raise ConfigurationError(f"Bad axis selection '{spec}'") from e
    if idx.size == 0 or idx.min() < 0 or idx.max() >= n:
        raise ConfigurationError(f"Axis selection '{spec}' is outside 1..{n}")
    return idx


def default_axis_specs(planes: ErrorPlanes) -> List[str]:
    """All times (or frequencies), midpoints in space, every bin or scatter."""
    specs = []
    for i, name in enumerate(planes.axis_names):
        specs.append("0" if i == 0 or name.startswith(("bin", "sample")) else "-1")
    return specs


def plot_table(
    planes: ErrorPlanes, axes: Optional[Sequence[str]] = None
) -> Tuple[List[str], np.ndarray]:
    """Column names and rows of plot-ready data for one graph.

    One column per data axis, then for each line the available planes.
    """
    specs = list(axes) if axes else default_axis_specs(planes)
    shape = planes.values.shape[1:-1]
    if len(specs) != len(shape):
        raise ConfigurationError(
            f"Axis selection needs {len(shape)} entries, got {len(specs)}"
        )
    selection = [parse_axis_spec(s, n) for s, n in zip(specs, shape)]
    grids = np.meshgrid(*selection, indexing="ij")
    flat = [g.ravel() for g in grids]
    columns = list(planes.axis_names)
    rows = [planes.axes[i][flat[i]] for i in range(len(shape))]
    for line in range(planes.values.shape[0]):
        block = planes.values[line]
        for c in range(NPLANES):
            if not planes.available[c]:
                continue
            columns.append(f"{PLANE_LABELS[c]}_{line + 1}")
            rows.append(block[tuple(flat) + (c,)])
    return columns, np.real(np.column_stack(rows))
