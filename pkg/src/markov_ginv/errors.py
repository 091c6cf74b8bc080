"""Exception hierarchy shared by every module in the package."""


class MarkovError(Exception):
    """Base class for all errors raised by markov_ginv."""


class ShapeMismatch(MarkovError, ValueError):
    pass


class SingularMatrix(MarkovError, ArithmeticError):
    pass


class NotStochastic(MarkovError, ValueError):
    """Negative entry or a row that does not sum to one.

    ``row`` is the 0-based index of the offending row when known.
    """

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row


class NotIrreducible(MarkovError, ValueError):
    pass


class InvalidPerturbation(NotStochastic):
    pass


class DegenerateParameters(MarkovError, ValueError):
    pass


class NotAGInverse(MarkovError, ValueError):
    pass


class ClassificationInconsistent(MarkovError):
    pass


class MPFormsDisagree(MarkovError):
    pass


class NotIn15a(MarkovError, ValueError):
    pass


class BadBeta(MarkovError, ValueError):
    pass


class UnknownCase(MarkovError, KeyError):
    pass


class RouteDisagreement(MarkovError):
    """Two routes for the same exact identity produced different answers."""

    def __init__(self, message, discrepancy=None):
        super().__init__(message)
        self.discrepancy = discrepancy


class TooManyCensored(MarkovError):
    pass


class NoConvergence(MarkovError):
    pass


class ChainFileError(MarkovError, ValueError):
    """Unparseable matrix or vector file; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        super().__init__(message)
        self.line = line
