"""Exception taxonomy shared across the package.

Everything numerical that can fail in a *diagnosable* way gets its own type, so
callers (and the CLI) can distinguish bad inputs from genuine numerical
breakdown without parsing messages.
"""


class ParameterError(ValueError):
    """A scalar argument is outside its admissible range."""


class GridMismatchError(ValueError):
    """Two fields that must share a grid do not."""


class OutOfDomainError(ValueError):
    """Evaluation requested outside a tabulated function's sample range."""


class UnsupportedReactionError(ValueError):
    """Operation requires structural knowledge a tabulated term cannot supply."""


class NotPushedError(ValueError):
    """Requested decay rates do not exist: the state is not invadable at this speed."""


class NoConnectionError(RuntimeError):
    """The shooting orbit fails to connect the two rest states."""


class RegimeError(RuntimeError):
    """A computed object violates the structural assumptions (e.g. non-monotone front)."""


class ResolutionError(ValueError):
    """Grid spacing too coarse for the requested operation."""


class FarFromManifoldError(RuntimeError):
    """Newton projection onto the wave family diverged or left its trust region."""


class BasinEscapeError(RuntimeError):
    """Relaxation flow is not contracting toward the wave family."""


class ConvergenceError(RuntimeError):
    """An iterative solver exhausted its budget without meeting tolerance."""


class TruncationError(RuntimeError):
    """A truncated integral's discarded tail exceeds its error budget."""


class DivergentIntegralError(ValueError):
    """The requested weighted integral does not converge for these parameters."""


class UndersamplingError(RuntimeError):
    """A Monte Carlo estimate has too few effective samples to be meaningful."""


class InstabilityError(RuntimeError):
    """A time stepper produced values far outside the physically admissible band."""


class DomainError(ValueError):
    """The computational domain cannot accommodate the requested configuration."""


class StatisticsError(RuntimeError):
    """Not enough clean replicates remain to form ensemble statistics."""


class ConfigRejectedError(RuntimeError):
    """Too large a fraction of replicates tripped their runtime guards."""


class NumericalError(RuntimeError):
    """A linear-algebra kernel failed on inputs that passed validation."""
