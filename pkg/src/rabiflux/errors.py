"""Exception types shared across the toolkit.

Plain ``ValueError`` is used for ordinary domain errors (negative lengths,
out-of-range fields, ...); the classes below mark conditions the CLI maps
to distinct exit codes.
"""


class NumericalError(RuntimeError):
    """Base class for failures of a numerical procedure (CLI exit code 2)."""


class StepSizeError(NumericalError):
    """Integrator step too coarse: conserved norm drifted beyond tolerance."""


class StabilityError(NumericalError):
    """Explicit finite-difference stability condition (CFL) violated."""


class FitError(NumericalError):
    """Nonlinear least squares failed to converge or hit a degenerate shape."""


class SamplingError(ValueError):
    """Input trace too sparsely sampled for the requested operation."""


class ShapeError(ValueError):
    """Trace does not have the shape the analysis expects."""


class ConfigError(ValueError):
    """Malformed run configuration; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
