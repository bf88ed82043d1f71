"""Exception types raised by the evaluators, scanners and checks."""


class SymzetaError(Exception):
    """Base class for all package errors."""


class PoleError(SymzetaError, ZeroDivisionError):
    """The requested point is a pole (or numerically indistinguishable from one)."""


class DomainError(SymzetaError, ValueError):
    """An argument lies outside the domain an operation accepts."""


class ConvergenceError(SymzetaError, ArithmeticError):
    pass


class ParseError(SymzetaError, ValueError):
    pass


class OrderError(SymzetaError, ValueError):
    pass


class InsufficientData(SymzetaError, ValueError):
    pass


class CountMismatch(SymzetaError, ValueError):
    pass


class OrderViolation(SymzetaError):
    """The pole/zero event sequence on the critical line broke its cyclic order."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class MonotonicityViolation(SymzetaError):
    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class SignViolation(SymzetaError):
    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point
