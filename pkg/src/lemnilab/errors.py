"""Exception types raised by lemnilab."""


class DomainError(ValueError):
    """Argument outside the domain of a function (e.g. m outside [0, 1))."""


class ConvergenceError(RuntimeError):
    """An iteration failed to converge within its cap."""

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class SingularityError(ArithmeticError):
    """Two bodies coupled through a logarithmic term (nearly) coincide.

    ``pair`` holds 1-based body labels; ``time`` is set during integration.
    """

    def __init__(self, message, pair=None, time=None):
        super().__init__(message)
        self.pair = pair
        self.time = time


class DegeneratePointError(ArithmeticError):
    """Curvature requested at a point of vanishing velocity."""


class IllPosedFitError(ValueError):
    """Least-squares design matrix is numerically rank deficient."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class StiffnessError(RuntimeError):
    """Adaptive step size underflowed."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class PreconditionError(ValueError):
    """Input state violates an operation's precondition."""
