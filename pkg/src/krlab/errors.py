"""Exception hierarchy for krlab.

Precondition violations (wrong shapes, negative counts, ...) raise plain
``ValueError``; the classes below signal runtime conditions that callers are
expected to handle or map to exit codes.
"""


class KrlabError(Exception):
    """Base class for all krlab-specific errors."""


class KrlabNumericalError(KrlabError):
    """Base class for numerical failures (CLI exit code 3)."""


class SingularMatrix(KrlabNumericalError):
    """A pivot underflowed the singularity threshold during elimination."""


class NoConvergence(KrlabNumericalError):
    """An iteration exhausted its sweep/step budget."""


class OverflowRisk(KrlabNumericalError):
    """Requested matrix exponential exceeds the documented norm bound."""


class DimensionMismatch(KrlabError):
    """Vector/matrix dimensions are inconsistent with the cone or operator."""


class UnsupportedCone(KrlabError):
    """The requested cone operation is outside the supported regime."""


class IterationLimit(KrlabNumericalError):
    """The LP pivot budget was exhausted."""


class LambdaInSpectrum(KrlabNumericalError):
    """Resolvent requested at (or numerically on) a spectral point."""


class SingularResolvent(KrlabNumericalError):
    """Shifted system was singular during inverse power iteration."""


class MuNotInSpectrum(KrlabError):
    """Generalized eigenspace requested at a non-spectral point."""


class ThresholdOnEigenvalue(KrlabError):
    """Spectral split threshold bisects an eigenvalue cluster."""


class MonotonicityViolated(KrlabError):
    """Discretization would lose the nonnegative off-diagonal structure."""


class ConfigInvalid(KrlabError):
    """Scenario configuration failed schema validation (CLI exit code 2)."""


class IoFailure(KrlabError):
    """Report or data file could not be written."""
