"""Exception types shared across the package.

Validation problems derive from ``ValueError``; failures of the numerics
themselves derive from :class:`NumericError`. The CLI maps the two families
to distinct exit codes.
"""


class NumericError(ArithmeticError):
    """Base class for numerical failures (poles, branch cuts, divergences)."""


class PoleError(NumericError):
    """The q-exponential base vanished while the exponent is negative."""


class BranchCutError(NumericError):
    """Base on the negative real axis with a non-integer exponent."""


class DivergentHorizon(NumericError):
    """Validity horizon is infinite (unitary limit q = 1)."""


class TruncationError(ValueError):
    """A truncated Fock ladder leaves too much probability in the tail."""


class NotHermitian(ValueError):
    pass


class StepSizeError(ValueError):
    pass


class GridMismatch(ValueError):
    """Two time series do not share the same time grid."""
