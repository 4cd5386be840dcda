"""Exception hierarchy shared by all pdlimits modules."""


class PDLimitsError(Exception):
    """Base class for every error raised by pdlimits."""


class InputError(PDLimitsError, ValueError):
    """Malformed or inconsistent input data (points, simplices, files)."""


class QueryError(PDLimitsError, ValueError):
    """A query that the computed object cannot answer faithfully.

    Typically raised when a persistent Betti number or rectangle mass is
    requested at or beyond the filtration cutoff, where censored deaths
    would corrupt the count.
    """


class BudgetExceededError(PDLimitsError, RuntimeError):
    """A configured resource budget was exhausted.

    ``partial`` carries whatever was computed before the budget ran out
    (e.g. a partial experiment report), or ``None``.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
