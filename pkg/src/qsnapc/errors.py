"""Exception hierarchy shared by the library and the command line."""


class QsnapcError(Exception):
    """Base class for every error raised by qsnapc."""


class InvalidDimensionError(QsnapcError, ValueError):
    pass


class InvalidArgumentError(QsnapcError, ValueError):
    pass


class NonUnitaryInputError(QsnapcError, ValueError):
    def __init__(self, deviation, tol):
        super().__init__(
            f"input is not unitary: max|U^dag U - I| = {deviation:.3e} exceeds tolerance {tol:.1e}"
        )
        self.deviation = deviation
        self.tol = tol


class NumericalFailureError(QsnapcError, ArithmeticError):
    pass


class TruncationRiskError(QsnapcError, ValueError):
    """Requested level sits too close to the Fock cutoff for a faithful simulation."""


class InsufficientDataError(QsnapcError, ValueError):
    pass


class FormatError(QsnapcError, ValueError):
    """A matrix, sequence or plan file does not follow its schema."""


class UnsupportedVersionError(FormatError):
    pass
