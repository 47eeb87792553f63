"""Common utilities for the stochastica tools."""

import importlib.metadata
import logging
import os
import time
from typing import Any, Dict, Optional


def setup_logging(
    log_level: str = "INFO", log_file: Optional[str] = None
) -> logging.Logger:
    """Set up logging configuration."""
    level = getattr(logging, log_level.upper(), logging.INFO)

    handlers: list[logging.Handler] = [logging.StreamHandler()]
    if log_file:
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=handlers,
        force=True,
    )

    return logging.getLogger(__name__)


def get_timestamp() -> float:
    """Get current timestamp."""
    return time.time()


def format_timestamp(timestamp: float) -> str:
    """Format timestamp for display."""
    return time.strftime("%Y-%m-%d %H:%M:%S", time.localtime(timestamp))


def validate_environment() -> Dict[str, Any]:
    """Check that the numerical stack is importable and report settings."""
    required_packages = ["numpy", "scipy", "pydantic", "python-dotenv"]
    optional_vars = [
        "STOCHASTICA_SEED",
        "STOCHASTICA_LOG_LEVEL",
        "STOCHASTICA_LOG_FILE",
        "STOCHASTICA_MAX_WORKERS",
    ]

    validation_result: Dict[str, Any] = {
        "valid": True,
        "missing_required": [],
        "packages": {},
        "environment_info": {},
    }

    for package in required_packages:
        try:
            validation_result["packages"][package] = importlib.metadata.version(
                package
            )
        except importlib.metadata.PackageNotFoundError:
            validation_result["missing_required"].append(package)
            validation_result["valid"] = False

    for var in optional_vars:
        value = os.getenv(var)
        if value:
            validation_result["environment_info"][var] = value

    return validation_result


class Timer:
    """Simple timer context manager for measuring execution time."""

    def __init__(self) -> None:
        self.start_time: Optional[float] = None
        self.end_time: Optional[float] = None
        self.elapsed: Optional[float] = None

    def __enter__(self) -> "Timer":
        self.start_time = time.perf_counter()
        return self

    def __exit__(self, exc_type: Any, exc_val: Any, exc_tb: Any) -> None:
        self.end_time = time.perf_counter()
        if self.start_time is not None:
            self.elapsed = self.end_time - self.start_time


def create_error_response(
    error_message: str, error_code: str = "SIMULATION_ERROR"
) -> Dict[str, Any]:
    """Create standardized error response."""
    return {
        "error": True,
        "error_code": error_code,
        "error_message": error_message,
        "timestamp": format_timestamp(get_timestamp()),
        "suggestion": "Rerun with --log-level DEBUG for more detail.",
    }
