"""Thresholds and Poisson approximation bounds for random k-set families."""

from ._core import (
    CapacityError,
    DomainError,
    InfeasibleError,
    SaturationError,
    __version__,
    count_overlaps,
    empirical_law,
    epsilon_multivariate,
    estimate,
    expected_pairs,
    hypergeometric_poisson_gap,
    janson_bounds,
    lambda_r,
    limit_probability,
    max_admissible_b,
    oracle,
    sample_family,
    threshold,
    tv_bound_univariate,
)

__all__ = [
    "CapacityError",
    "DomainError",
    "InfeasibleError",
    "SaturationError",
    "__version__",
    "count_overlaps",
    "empirical_law",
    "epsilon_multivariate",
    "estimate",
    "expected_pairs",
    "hypergeometric_poisson_gap",
    "janson_bounds",
    "lambda_r",
    "limit_probability",
    "max_admissible_b",
    "oracle",
    "sample_family",
    "threshold",
    "tv_bound_univariate",
]
