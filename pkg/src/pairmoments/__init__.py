"""Pairwise-difference representations of central moments.

Location-free moment machinery: unbiased difference kernels, exact
expectation checks over finite distributions, sample estimators, numeric
summation identities, and a seeded bias-simulation harness.
"""

from .backend import backend_name
from .distributions import DistributionSpec, RngStream, derangement, parse_distribution
from .estimators import (
    DegenerateSampleError,
    MomentEstimate,
    diff_moment_exhaustive,
    diff_moment_mc,
    gini_covariance,
    gini_variance,
    natural_moment,
    pairwise_skewness_kurtosis,
    regression_slope,
)
from .exact import (
    CheckReport,
    ENUMERATION_CAP,
    EnumerationCapError,
    FiniteDistribution,
    FiniteMultivariate,
    catalog_names,
    central_moment_exact,
    expect_iid,
    expect_pair,
    odd_difference_moment_check,
    verify_identity,
)
from .identities import (
    IdentityReport,
    check_binet_cauchy,
    check_gini_covariance,
    check_gini_variance,
    check_lagrange,
)
from .kernels import (
    K_MAX,
    MomentKernel,
    binomial,
    difference_sums_3,
    kernel_deviation_product,
    kernel_minimal,
    kernel_minimal_even,
    kernel_minimal_raw,
)
from .simulation import (
    BiasReport,
    ExperimentConfig,
    run_bias_experiment,
    summarize,
)

__version__ = "0.1.0"
