"""Tie-aware rank tests of independence and randomness built on the multilinear copula."""

from .dist import are, chi2_sf, normal_cdf, normal_quantile, recommend_score
from .empirical import build_margin, build_serial_frame, score_column
from .exceptions import DegenerateDataError, DomainError, InputError, MlcopError, NumericalError
from .power import PowerStudyConfig, load_config, run_power_study
from .scores import BLEST, SAVAGE, SPEARMAN, VAN_DER_WAERDEN, get_family
from .simulate import parse_margin, parse_model, sample_series, tau_to_param
from .stats import TestReport, dependogram, permutation_pvalue, test_independence, test_randomness

__version__ = "0.1.0"

__all__ = [
    "are",
    "chi2_sf",
    "normal_cdf",
    "normal_quantile",
    "recommend_score",
    "build_margin",
    "build_serial_frame",
    "score_column",
    "DegenerateDataError",
    "DomainError",
    "InputError",
    "MlcopError",
    "NumericalError",
    "PowerStudyConfig",
    "load_config",
    "run_power_study",
    "BLEST",
    "SAVAGE",
    "SPEARMAN",
    "VAN_DER_WAERDEN",
    "get_family",
    "parse_margin",
    "parse_model",
    "sample_series",
    "tau_to_param",
    "TestReport",
    "dependogram",
    "permutation_pvalue",
    "test_independence",
    "test_randomness",
]
