"""Exception hierarchy shared by every module."""


class ToricMMPError(Exception):
    """Base class for all errors raised by the package."""


class InputError(ToricMMPError, ValueError):
    """Malformed or inconsistent input data."""


class ZeroVector(InputError):
    pass


class EmptyFeasible(ToricMMPError):
    """The constraint system of a linear program has no solution."""


class NonSimplicialFan(InputError):
    pass


class NonIntegralDivisor(InputError):
    pass


class NotCartier(InputError):
    pass


class EmptyLinearSystem(ToricMMPError):
    pass


class OutsideSupport(ToricMMPError):
    pass


class NotKlt(ToricMMPError):
    pass


class NonEffective(InputError):
    pass


class AlreadyNef(ToricMMPError):
    pass


class BoundViolation(ToricMMPError):
    """A theorem-guaranteed bound failed: always an implementation bug."""


class DegreeMismatch(InputError):
    pass


class NotExtremal(ToricMMPError):
    pass


class NotNegative(ToricMMPError):
    pass


class NotFlipping(ToricMMPError):
    pass


class FlipVerificationFailed(ToricMMPError):
    """A toric flip failed one of its defining checks: always a bug."""


class BudgetExceeded(ToricMMPError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class NotSaturated(ToricMMPError):
    def __init__(self, message, violation=None):
        super().__init__(message)
        self.violation = violation


class ClaimViolation(ToricMMPError):
    pass


class SNotIrreducible(InputError):
    pass
