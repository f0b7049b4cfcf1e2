"""Exception hierarchy shared by all modules."""


class QWiretapError(ValueError):
    """Base class for every error raised by this package."""


class NonHermitian(QWiretapError):
    pass


class NotPositive(QWiretapError):
    pass


class EmptySupport(QWiretapError):
    pass


class DimensionMismatch(QWiretapError):
    pass


class SingularSpectrum(QWiretapError):
    pass


class SizeMismatch(QWiretapError):
    pass


class NonStochastic(QWiretapError):
    pass


class BudgetExceeded(QWiretapError):
    pass


class SupportViolation(QWiretapError):
    pass


class InputOutOfRange(QWiretapError):
    pass


class Infeasible(QWiretapError):
    pass


class NotIndependent(QWiretapError):
    pass


class InvalidTable(QWiretapError):
    pass


class NotPrime(QWiretapError):
    pass


class RankDeficient(QWiretapError):
    pass


class IndivisibleDomain(QWiretapError):
    pass


class NotNested(QWiretapError):
    pass


class NotInjective(QWiretapError):
    pass


class BadRepresentatives(QWiretapError):
    pass


class NonCommuting(QWiretapError):
    pass


class SpecParseError(QWiretapError):
    """Malformed channel or experiment document.

    ``where`` names the offending field path or ``line:col`` position.
    """

    def __init__(self, message, where=None):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)
