"""Exception hierarchy.

The CLI maps each family onto an exit code: ``InvalidInput`` -> 2,
``OutOfValidity`` -> 3, ``NumericalFailure`` -> 4.
"""


class PowerSpdError(Exception):
    """Base class for all errors raised by powerspd."""


class InvalidInput(PowerSpdError, ValueError):
    pass


class OutOfValidity(PowerSpdError, ValueError):
    """Inputs are well formed but outside the region where a result exists."""


class NumericalFailure(PowerSpdError, ArithmeticError):
    pass


class NotSymmetric(InvalidInput):
    pass


class NotPositiveDefinite(InvalidInput):
    pass


class DimensionMismatch(InvalidInput):
    pass


class BranchMismatch(InvalidInput):
    """Operation not defined for the branch of the given geodesic."""


class ZeroPower(InvalidInput):
    pass


class BetaOutOfRange(OutOfValidity):
    pass


class GammaOutOfRange(OutOfValidity):
    pass


class LinearlyDependentPair(OutOfValidity):
    pass


class ConvergenceFailure(NumericalFailure):
    pass


class NoConvergence(NumericalFailure):
    pass


class LeftCone(NumericalFailure):
    """An integrated curve lost positive definiteness."""
