"""Exception taxonomy shared by the library, the service and the CLI.

Every error carries a stable machine-readable ``code``.  Errors split into
two families: input/validation problems (bad parameters, infeasible targets,
not enough data) and numerical failures (an iteration that did not converge,
a boundary assembly whose containment check failed).  The CLI maps the first
family to exit code 1 and the second to exit code 2.
"""


class GldlmError(Exception):
    """Base class for all library errors."""

    code = "error"


class InvalidParamsError(GldlmError):
    """Parameter vector does not define a distribution."""

    code = "invalid-params"


class DomainError(GldlmError):
    """Argument outside the mathematical domain of an operation."""

    code = "domain-error"


class LMomentsUndefinedError(GldlmError):
    """L-moments do not exist (a shape exponent is <= -1 or at a pole)."""

    code = "lmoments-undefined"


class InsufficientDataError(GldlmError):
    """Too few observations for the requested estimate."""

    code = "insufficient-data"


class UnknownRegionError(GldlmError):
    """Region identifier outside the atlas scope (regions 3-6)."""

    code = "unknown-region"


class InfeasibleTargetError(GldlmError):
    """(tau3, tau4) target violates the universal L-moment ratio bounds."""

    code = "infeasible-target"


class NoFeasibleStartError(GldlmError):
    """No starting point available for the optimizer."""

    code = "no-feasible-start"


class DegenerateScaleError(GldlmError):
    """Location/scale recovery hit a zero scale bracket."""

    code = "degenerate-scale"


class EmptyContourError(GldlmError):
    """A requested contour level is not attained anywhere on the grid."""

    code = "empty-contour"


class NoConvergenceError(GldlmError):
    """Iterative numerical routine exhausted its iteration budget."""

    code = "no-convergence"


class AssemblyError(GldlmError):
    """Boundary assembly failed its containment postcondition."""

    code = "assembly-failure"


#: Errors caused by user input; the CLI exits with status 1 on these.
VALIDATION_ERRORS = (
    InvalidParamsError,
    DomainError,
    LMomentsUndefinedError,
    InsufficientDataError,
    UnknownRegionError,
    InfeasibleTargetError,
    NoFeasibleStartError,
    EmptyContourError,
)

#: Numerical failures; the CLI exits with status 2 on these.
NUMERICAL_ERRORS = (
    DegenerateScaleError,
    NoConvergenceError,
    AssemblyError,
)
