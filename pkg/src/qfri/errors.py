"""Exception hierarchy shared by every module in the package."""


class QfriError(ValueError):
    """Base class for validation and domain failures."""


class DimensionMismatch(QfriError):
    pass


class NotHermitian(QfriError):
    pass


class NotPSD(QfriError):
    def __init__(self, min_eigenvalue: float):
        super().__init__(f"matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")
        self.min_eigenvalue = min_eigenvalue


class TraceNotOne(QfriError):
    def __init__(self, trace: float):
        super().__init__(f"trace is {trace!r}, expected 1")
        self.trace = trace


class SupportViolation(QfriError):
    """supp(g1) is not contained in supp(g0); the relative entropy is infinite."""


class CapExceeded(QfriError):
    def __init__(self, required: int, cap: int):
        super().__init__(f"tensor dimension {required} exceeds cap {cap}")
        self.required = required
        self.cap = cap


class DomainError(QfriError):
    pass


class FullRankRequired(QfriError):
    pass


class ExpOverflow(QfriError, OverflowError):
    pass


class NumericalFailure(QfriError, ArithmeticError):
    pass


class InvalidRank(QfriError):
    pass


class ToleranceNotMet(NumericalFailure):
    pass


class DegenerateSigma(QfriError):
    pass


class NotCommuting(QfriError):
    pass


class NotThermal(QfriError):
    pass


class SpectrumOutOfRange(QfriError):
    pass
