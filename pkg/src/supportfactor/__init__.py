"""Support sets of bivariate distributions and the support-factorization screen for independence."""

__version__ = "0.1.0"

from .distributions import (
    ContinuousJoint,
    DiscreteJoint,
    LebesgueMixture,
    MarginalPMF,
    MixedJoint,
    Univariate,
    beta_bernoulli_joint,
    canonical_pdf_1d,
    canonical_pdf_2d,
    cantor_cdf,
    marginals,
    mixture_cdf,
)
from .estimators import SupportEstimator, SupportIndependenceScreen
from .exceptions import InvalidDistributionError, InvalidInputError, NumericError, SupportFactorError
from .independence import (
    Verdict,
    cdf_factorization_probe,
    check,
    conditional_support_check,
    continuous_factorization_probe,
    discrete_factorization_oracle,
    nary_discrete_check,
    necessary_condition,
)
from .sets import ClosedSet1D, ComparisonReport, Grid, Region2D, cartesian_product, closure1d, limit_points1d, region_compare
from .support import (
    SupportReport,
    amiability_check,
    conditional_support,
    empirical_support,
    points_of_increase_1d,
    points_of_increase_2d,
    support,
    support_continuous_1d,
    support_discrete,
    support_region_2d,
)
