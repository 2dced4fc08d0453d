"""Exception types raised across the package."""


class ParameterError(ValueError):
    """A distribution or model parameter is outside its admissible range."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function."""


class RankDeficientError(ValueError):
    """The design matrix does not have full column rank."""


class DataError(ValueError):
    """A censored dataset violates its structural invariants."""


class OptimizerFailure(RuntimeError):
    """The optimizer produced an inconsistent result (e.g. a negative LR statistic)."""


class TooManyFailures(RuntimeError):
    """Too many Monte Carlo or bootstrap replicates failed to fit."""
