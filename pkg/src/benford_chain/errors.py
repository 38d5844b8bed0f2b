"""Exception hierarchy shared by every module of the package."""


class BenfordChainError(Exception):
    """Base class; the CLI maps these to exit code 1 unless noted otherwise."""


class MatrixValidationError(BenfordChainError, ValueError):
    pass


class NegativeEntry(MatrixValidationError):
    pass


class RowSumViolation(MatrixValidationError):
    pass


class DimensionTooSmall(MatrixValidationError):
    pass


class DimensionTooLarge(BenfordChainError, ValueError):
    pass


class ChainStructureError(BenfordChainError):
    """Raised when an analysis needs an irreducible aperiodic chain and did not get one.

    Carries the classification so callers can print diagnostics (SCCs, period).
    """

    def __init__(self, message, classification=None):
        super().__init__(message)
        self.classification = classification


class NotIrreducible(ChainStructureError):
    pass


class NotAperiodic(ChainStructureError):
    pass


class ConvergenceFailure(BenfordChainError, ArithmeticError):
    pass


class MultipleEigenvalue(BenfordChainError, ArithmeticError):
    pass


class UnsupportedDegree(BenfordChainError, ValueError):
    pass


class ZeroInput(BenfordChainError, ValueError):
    pass


class LeadingZero(BenfordChainError, ValueError):
    pass


class EmptySample(BenfordChainError, ValueError):
    pass


class NOverflow(BenfordChainError, ValueError):
    pass


class PrecisionBudgetExceeded(BenfordChainError, ArithmeticError):
    pass


class TooShort(BenfordChainError, ValueError):
    pass


class UnknownStateLabel(BenfordChainError, ValueError):
    pass
