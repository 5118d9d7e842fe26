"""Lasso path, covariance significance tests and L1 + SICA regularization."""

__version__ = "0.1.0"

from .covtest import (CovTestResult, combined_covariance_statistic,  # noqa: F401
                      conditional_covariance_statistic, covariance_statistic)
from .data import (Dataset, SupportSet, generate_design, generate_response,  # noqa: F401
                   signal_beta_star, simulate, standardize)
from .distributions import Null, ks_distance, null_quantile, p_value  # noqa: F401
from .lars import coefficients_at, lars_path, screened_at_size, support_at_step  # noqa: F401
from .solvers import (CoefficientVector, PenaltySpec, combined_path,  # noqa: F401
                      combined_solve, constrained_combined, constrained_lasso, lasso_at,
                      sica, sica_derivative)
