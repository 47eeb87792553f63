"""stochastica: stochastic (partial) differential equations with error estimates."""

from .config import SimConfig, build_config, get_settings
from .engine import scan_parameter, simulate
from .error_estimates import ErrorPlanes, ErrorVector, xcheck
from .exceptions import StochasticaError
from .models import MODELS, get_model
from .results_file import ResultData, read_results, write_results

__version__ = "0.1.0"

__all__ = [
    "MODELS",
    "ErrorPlanes",
    "ErrorVector",
    "ResultData",
    "SimConfig",
    "StochasticaError",
    "build_config",
    "get_model",
    "get_settings",
    "read_results",
    "scan_parameter",
    "simulate",
    "write_results",
    "xcheck",
]
