"""Exception types shared across treeharm."""


class TreeharmError(Exception):
    """Base class for treeharm-specific errors."""


class ParameterError(TreeharmError, ValueError):
    """A scalar argument lies outside its documented domain."""


class DepthError(TreeharmError):
    """A vertex lies deeper than the sector depth supports."""


class SingularityError(TreeharmError):
    """Evaluation requested at (or numerically too close to) a pole."""


class TruncationError(TreeharmError):
    """The truncated tree does not leave enough valid levels for the request."""


class EvaluationError(TreeharmError):
    """A symbol produced non-finite values on an evaluation grid."""


class SynthesisError(TreeharmError):
    """Kernel synthesis failed to meet the residual tolerance."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class InvertibilityError(TreeharmError):
    """Symbol too close to zero somewhere on the strip; no inverse multiplier."""

    def __init__(self, message: str, min_modulus: float | None = None,
                 argmin: complex | None = None):
        super().__init__(message)
        self.min_modulus = min_modulus
        self.argmin = argmin


class DistinctnessError(TreeharmError, ValueError):
    """Interpolation nodes are not pairwise distinct."""


class IllConditionedError(TreeharmError):
    """Linear system condition number exceeds the configured cutoff."""

    def __init__(self, message: str, condition_number: float | None = None):
        super().__init__(message)
        self.condition_number = condition_number


class UnsupportedOrderError(TreeharmError, ValueError):
    """Derivative or annihilation order beyond the supported range."""


class DegenerateError(TreeharmError):
    """Input is degenerate for the requested computation (e.g. all zero)."""


class UnsupportedScenarioError(TreeharmError):
    """Scenario falls outside the implemented symbol/level-set families."""


class ConfigError(TreeharmError, ValueError):
    """Invalid run configuration; the message names the offending field."""
