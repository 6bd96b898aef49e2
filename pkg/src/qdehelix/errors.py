"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class QDEError(Exception):
    """Base class for every error raised by qdehelix."""

    exit_code = 5


class DimensionError(QDEError, ValueError):
    exit_code = 2


class ArgumentError(QDEError, ValueError):
    exit_code = 2


class ScalarKindError(QDEError, TypeError):
    """Exact and floating scalars were mixed."""

    exit_code = 5


class AdmissibilityError(QDEError, ValueError):
    exit_code = 2

    def __init__(self, message: str, ray=None):
        super().__init__(message)
        self.ray = ray


class CoalescenceError(QDEError, ValueError):
    exit_code = 2


class ChamberError(QDEError, ValueError):
    exit_code = 2


class NumericError(QDEError, ArithmeticError):
    exit_code = 4


class TailBoundError(NumericError):
    def __init__(self, message: str, suggested_orders: tuple[int, int] | None = None):
        super().__init__(message)
        self.suggested_orders = suggested_orders


class PrecisionError(NumericError):
    pass


class IntegrationError(NumericError):
    def __init__(self, message: str, last_point: complex | None = None):
        super().__init__(message)
        self.last_point = last_point


class BasisError(QDEError, ValueError):
    """An ordered K-theory basis failed the exceptionality check."""

    exit_code = 5

    def __init__(self, message: str, offending: list[tuple[int, int]] | None = None):
        super().__init__(message)
        self.offending = offending or []


class InternalConsistencyError(QDEError, AssertionError):
    exit_code = 5


class OracleDisagreementError(QDEError, AssertionError):
    exit_code = 5


class NotFoundError(QDEError, LookupError):
    """Braid-orbit search finished without a match below tolerance."""

    exit_code = 3

    def __init__(self, message: str, best_residual: float, best_word=None):
        super().__init__(message)
        self.best_residual = best_residual
        self.best_word = best_word
