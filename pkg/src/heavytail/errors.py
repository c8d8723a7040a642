"""Exception types shared across the package.

Exit-code mapping used by the CLI: ParameterError and ConfigError are usage
errors (exit 2); the regime/numeric errors below map to exit 3.
"""


class HeavytailError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(HeavytailError, ValueError):
    """An argument is outside its documented domain."""


class UnsupportedLawError(HeavytailError):
    """The requested distribution family does not support this operation."""


class UnsupportedCaseError(HeavytailError):
    """A mathematically excluded case was requested (e.g. alpha=1 with an
    asymmetric pair in the stable characteristic function)."""


class DegenerateSampleError(HeavytailError):
    """Sample has no usable variation (e.g. all values equal in a tail fit)."""


class DivergenceError(HeavytailError):
    """A simulated recursion left the contractive regime; the message names
    the violated invariant."""


class NoRootError(HeavytailError):
    """Moment-equation root finding found no sign change on the expanded
    bracket, or the expectation was non-finite at a bracket end."""


class InsufficientExceedancesError(HeavytailError):
    """Fewer exceedances above the threshold than the estimator requires."""


class InsufficientCyclesError(HeavytailError):
    """Fewer complete regeneration cycles than the statistic requires."""


class NoCyclesError(HeavytailError):
    """No regeneration occurred in the simulated span."""


class MinorizationInvalidError(HeavytailError):
    """Residual-kernel rejection exceeded its iteration guard: the split
    parameters do not minorize this transition kernel."""


class WidenRError(HeavytailError):
    """A ratio-scan grid point collected fewer exceedances than required;
    the message names the point."""


class OutOfRegimeError(HeavytailError):
    """Estimated or requested tail index is outside the theorem's regime."""


class SingularDrawError(HeavytailError):
    """Too many singular matrix draws in a closed-form evaluation."""


class ConfigError(HeavytailError):
    """Experiment-file validation failure carrying every error found."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
