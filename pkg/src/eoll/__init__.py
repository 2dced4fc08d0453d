"""Exponentiated odd log-logistic generated distributions, the EOLLW/LEOLLW
family, shape analysis and censored location-scale regression."""

from .distcore import EollGParams, Gumbel, Weibull, eollg_cdf, eollg_pdf, eollg_quantile, sample
from .eollw import EollwParams, LeollwParams
from .errors import (
    DataError,
    DomainError,
    OptimizerFailure,
    ParameterError,
    RankDeficientError,
    TooManyFailures,
)
from .regress import CensoredDataset, FitOptions, FitResult, RegressionModel, fit, lr_test
from .shape import shape_report

__version__ = "0.1.0"

__all__ = [
    "CensoredDataset",
    "DataError",
    "DomainError",
    "EollGParams",
    "EollwParams",
    "FitOptions",
    "FitResult",
    "Gumbel",
    "LeollwParams",
    "OptimizerFailure",
    "ParameterError",
    "RankDeficientError",
    "RegressionModel",
    "TooManyFailures",
    "Weibull",
    "eollg_cdf",
    "eollg_pdf",
    "eollg_quantile",
    "fit",
    "lr_test",
    "sample",
    "shape_report",
]
