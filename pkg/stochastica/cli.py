"""Command-line front end.

    stochastica list
    stochastica run <model> [--set key=value ...] [--out file]
    stochastica check <model> [--levels n]
    stochastica plot-data <file> [--graph n] [--sequence s] [--axes=spec,...]

Exit status is 0 on success, 1 when a simulation or file operation fails
and 2 on usage errors (bad arguments, unknown model or override key).
A convergence check that fails to converge also exits with 1, as does a
missing required package.
"""

import argparse
import logging
import sys
from typing import Dict, List, Optional, Sequence, TextIO

import numpy as np

from shared.utils import create_error_response, setup_logging, validate_environment

from .config import SimConfig, get_settings
from .engine import ScanTable, scan_parameter, simulate
from .error_estimates import ConvergenceTable, ErrorVector, xcheck
from .exceptions import ConfigurationError, StochasticaError
from .models import ModelEntry, get_model, list_models
from .results_file import plot_table, read_results, write_results

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


class UsageError(Exception):
    """Arguments that parse but can't be acted on."""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stochastica",
        description="Stochastic differential equation engine with error estimates",
    )
    parser.add_argument("--log-level", default=None,
                        help="Logging level (default from STOCHASTICA_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="List the built-in models")

    run = sub.add_parser("run", help="Run a model and print the error summary")
    run.add_argument("model")
    run.add_argument("--set", dest="overrides", action="append", default=[],
                     metavar="KEY=VALUE", help="Override a parameter (repeatable)")
    run.add_argument("--out", default=None, help="Write results to this file")
    run.add_argument("--workers", type=int, default=None,
                     help="Parallel ensemble lanes")

    check = sub.add_parser("check", help="Convergence check with halved steps")
    check.add_argument("model")
    check.add_argument("--levels", type=int, default=2)
    check.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="KEY=VALUE")

    plot = sub.add_parser("plot-data", help="Print plot-ready columns from a file")
    plot.add_argument("file")
    plot.add_argument("--graph", type=int, default=1)
    plot.add_argument("--sequence", type=int, default=1)
    plot.add_argument("--axes", default=None,
                      help="Comma-separated per-axis selections, e.g. --axes=0,-1")
    return parser


def parse_overrides(items: Sequence[str]) -> Dict[str, str]:
    overrides: Dict[str, str] = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"Override '{item}' is not of the form key=value")
        overrides[key.strip()] = value
    return overrides


def _configure(entry: ModelEntry, overrides: Dict[str, str]) -> List[SimConfig]:
    configs = entry.build()
    if not overrides:
        return configs
    try:
        return [cfg.with_overrides(overrides) for cfg in configs]
    except ConfigurationError as e:
        raise UsageError(str(e)) from e


def _lookup(name: str) -> ModelEntry:
    try:
        return get_model(name)
    except ConfigurationError as e:
        raise UsageError(str(e)) from e


def format_summary(vector: ErrorVector) -> str:
    lines = [
        f"RMS errors: Step={vector.step:.3g} Samp={vector.sampling:.3g} "
        f"Diff={vector.comparison:.3g}",
        f"Total={vector.total:.3g}  chi2/k={vector.chi2_per_k:.3g}  "
        f"time={vector.elapsed:.2f}s",
    ]
    for entry in vector.report:
        parts = [f"graph {entry['graph']}"]
        for key in ("step", "sampling", "diff"):
            if key in entry:
                parts.append(f"{key}={entry[key]:.3g}")
        if entry.get("k"):
            parts.append(f"chi2/k={entry['chi2'] / entry['k']:.3g} (k={entry['k']})")
        lines.append("   " + ", ".join(parts))
    return "\n".join(lines)


def format_scan(table: ScanTable) -> str:
    header = [table.key, "mean", "step", "sampling"]
    if table.comparison is not None:
        header.append("compare")
    lines = ["  ".join(f"{h:>12}" for h in header)]
    for i, row in enumerate(table.rows):
        cells = [row["value"], row["mean"], row["step"], row["sampling"]]
        if table.comparison is not None:
            cells.append(table.comparison[i])
        lines.append("  ".join(f"{float(c):12.6g}" for c in cells))
    return "\n".join(lines)


def format_convergence(table: ConvergenceTable) -> str:
    lines = [f"{'steps':>8} {'dt':>12} {'difference':>12} {'step err':>12} "
             f"{'samp err':>12}"]
    for lv in table.levels:
        lines.append(f"{lv.steps:8d} {lv.dt:12.4g} {lv.difference:12.4g} "
                     f"{lv.step_error:12.4g} {lv.sampling_error:12.4g}")
    return "\n".join(lines)


def cmd_list(out: TextIO) -> int:
    for entry in list_models():
        out.write(f"{entry.name:20s} {entry.description}\n")
    return EXIT_OK


def cmd_run(args: argparse.Namespace, out: TextIO) -> int:
    entry = _lookup(args.model)
    configs = _configure(entry, parse_overrides(args.overrides))
    if entry.scan is not None:
        scan = entry.scan
        table = scan_parameter(configs[0], scan.key, scan.values, scan.extract,
                               scan.compare)
        out.write(format_scan(table) + "\n")
        return EXIT_OK
    vector, results = simulate(configs, max_workers=args.workers)
    out.write(f"✅ {entry.name}: {configs[-1].name}\n")
    out.write(format_summary(vector) + "\n")
    for miss in entry.check(vector, results):
        out.write(f"⚠️  Expectation not met: {miss}\n")
    if args.out:
        path = write_results(args.out, results)
        out.write(f"Results written to {path}\n")
    return EXIT_OK


def cmd_check(args: argparse.Namespace, out: TextIO) -> int:
    entry = _lookup(args.model)
    configs = _configure(entry, parse_overrides(args.overrides))
    if args.levels < 1:
        raise UsageError("--levels must be at least 1")
    table = xcheck(args.levels, configs[0])
    marker = "✅" if table.monotone else "❌"
    out.write(f"{marker} {entry.name}: convergence over {args.levels} levels\n")
    out.write(format_convergence(table) + "\n")
    return EXIT_OK if table.monotone else EXIT_FAILURE


def cmd_plot_data(args: argparse.Namespace, out: TextIO) -> int:
    results = read_results(args.file)
    planes = results.graph(args.graph, args.sequence)
    axes = args.axes.split(",") if args.axes else None
    columns, rows = plot_table(planes, axes)
    if not np.all(np.isfinite(rows)):
        raise StochasticaError("Plot data contains non-finite values",
                               {"graph": args.graph})
    out.write("# " + " ".join(columns) + "\n")
    for row in rows:
        out.write(" ".join(f"{v:.10g}" for v in row) + "\n")
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    """Entry point for the ``stochastica`` console script."""
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    settings = get_settings()
    setup_logging(args.log_level or settings.log_level, settings.log_file)
    ok, problem = settings.validate()
    if not ok:
        print(f"❌ Configuration error: {problem}", file=sys.stderr)
        return EXIT_USAGE

    environment = validate_environment()
    if not environment["valid"]:
        missing = ", ".join(environment["missing_required"])
        print(f"❌ Missing packages: {missing}", file=sys.stderr)
        return EXIT_FAILURE
    logger.debug(f"Packages: {environment['packages']}")

    handlers = {
        "list": lambda: cmd_list(out),
        "run": lambda: cmd_run(args, out),
        "check": lambda: cmd_check(args, out),
        "plot-data": lambda: cmd_plot_data(args, out),
    }
    try:
        return handlers[args.command]()
    except UsageError as e:
        print(f"❌ {e}", file=sys.stderr)
        return EXIT_USAGE
    except StochasticaError as e:
        response = create_error_response(str(e), type(e).__name__)
        logger.error(f"{args.command} failed: {response}")
        print(f"❌ Error: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as e:
        logger.error(f"{args.command} failed: {e}")
        print(f"❌ Error: {e}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
