"""Exception hierarchy for stochastica."""

from typing import Any, Dict, Optional


class StochasticaError(Exception):
    """Base class for every error raised by the engine."""

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.context: Dict[str, Any] = context or {}

    def __str__(self) -> str:
        if not self.context:
            return self.message
        details = ", ".join(f"{k}={v}" for k, v in self.context.items())
        return f"{self.message} ({details})"


class ConfigurationError(StochasticaError):
    """Invalid or inconsistent simulation parameters."""


class NoiseGenerationError(StochasticaError):
    """A noise filter returned an unusable array."""


class ShapeError(StochasticaError):
    """Arrays that must agree in shape do not."""


class TransformError(StochasticaError):
    """A trigonometric or Fourier transform cannot be applied."""


class UnsupportedOperationError(StochasticaError):
    """The requested operation is not available for these boundaries."""


class DivergenceError(StochasticaError):
    """Field values became non-finite during integration."""

    def __init__(
        self,
        message: str,
        t: float,
        method: str,
        sequence: Optional[int] = None,
    ):
        context: Dict[str, Any] = {"t": t, "method": method}
        if sequence is not None:
            context["sequence"] = sequence
        super().__init__(message, context)
        self.t = t
        self.method = method
        self.sequence = sequence


class ProjectionError(StochasticaError):
    """Normal projection onto a manifold did not converge."""


class DegenerateEnsembleError(StochasticaError):
    """Every trajectory weight fell below the breeding threshold."""


class ResultFileError(StochasticaError):
    """A result file could not be written or read."""


class ChecksumError(ResultFileError):
    """A result file payload does not match its recorded checksum."""
