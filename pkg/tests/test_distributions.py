import math

import numpy as np
import pytest
from scipy import stats

from supportfactor.distributions import (
    ContinuousJoint,
    DiscreteJoint,
    LebesgueMixture,
    MarginalPMF,
    MixedJoint,
    binomial_pmf,
    canonical_pdf_1d,
    canonical_pdf_2d,
    cantor_cdf,
    dyadic_pmf,
    exponential,
    geometric_pmf,
    marginals,
    mixture_cdf,
    normal,
    numeric_jacobian_det,
    poisson_pmf,
    product_joint,
    uniform,
)
from supportfactor.exceptions import InvalidDistributionError, InvalidInputError
from supportfactor.registry import example9_inverse


def test_pmf_merges_and_drops_zero():
    m = MarginalPMF(((1.0, 0.25), (1.0, 0.25), (2.0, 0.5), (3.0, 0.0)))
    assert list(m.values) == [1.0, 2.0]
    assert m.pmf(1.0) == pytest.approx(0.5)
    assert m.cdf(1.5) == pytest.approx(0.5)


def test_pmf_rejects_bad_mass():
    with pytest.raises(InvalidDistributionError):
        MarginalPMF(((0.0, -0.1), (1.0, 1.1)))
    with pytest.raises(InvalidDistributionError):
        MarginalPMF(((0.0, 0.3), (1.0, 0.3)))


@pytest.mark.parametrize(
    "m, ref",
    [
        (poisson_pmf(3.0), stats.poisson(3.0)),
        (geometric_pmf(0.5), stats.geom(0.5, loc=-1)),
        (binomial_pmf(10, 0.3), stats.binom(10, 0.3)),
    ],
)
def test_truncated_pmfs_match_scipy(m, ref):
    assert np.allclose(m.probs, ref.pmf(m.values), atol=1e-15)
    assert m.truncation_mass <= 1e-12


def test_dyadic_declares_zero_as_limit():
    m = dyadic_pmf()
    assert m.declared_limit_points == (0.0,)
    assert np.allclose(m.probs, m.values)


def test_joint_validation():
    with pytest.raises(InvalidInputError):
        DiscreteJoint((((0, 0), 0.5), ((0, 0), 0.5)))
    with pytest.raises(InvalidDistributionError):
        DiscreteJoint((((0, 0), 1.5), ((1, 0), -0.5)))


def test_marginals_of_outer_product():
    px = MarginalPMF(((0.0, 0.2), (1.0, 0.8)))
    py = MarginalPMF(((5.0, 0.5), (6.0, 0.5)))
    mx, my = marginals(DiscreteJoint.outer(px, py))
    assert np.allclose(mx.probs, px.probs) and np.allclose(my.probs, py.probs)


def test_joint_cdf():
    j = DiscreteJoint((((0, 0), 0.25), ((0, 1), 0.25), ((1, 0), 0.25), ((1, 1), 0.25)))
    assert float(j.cdf(0.5, 0.5)) == pytest.approx(0.25)
    assert float(j.cdf(1.0, 1.0)) == pytest.approx(1.0)


def test_canonical_pdf_1d_builtin():
    x = np.linspace(-3, 3, 61)
    assert np.max(np.abs(canonical_pdf_1d(stats.norm.cdf, x) - stats.norm.pdf(x))) < 1e-6
    assert canonical_pdf_1d(exponential(1.0).cdf, 0.0) == 0.0
    assert canonical_pdf_1d(uniform().cdf, 0.5) == pytest.approx(1.0, abs=1e-6)
    # kinks of the uniform CDF
    assert canonical_pdf_1d(uniform().cdf, 0.0) == 0.0
    assert canonical_pdf_1d(uniform().cdf, 1.0) == 0.0


def test_canonical_pdf_rejects_decreasing():
    with pytest.raises(InvalidDistributionError):
        canonical_pdf_1d(lambda t: -np.asarray(t), 0.0)


def test_canonical_pdf_2d_normal_product():
    F = lambda x, y: stats.norm.cdf(x) * stats.norm.cdf(y)
    assert canonical_pdf_2d(F, 0.0, 0.0) == pytest.approx(1 / (2 * math.pi), abs=1e-6)
    assert canonical_pdf_2d(F, 1.0, -0.5) == pytest.approx(stats.norm.pdf(1.0) * stats.norm.pdf(-0.5), abs=1e-6)


def test_cantor_staircase_values():
    c = cantor_cdf(20)
    assert c(0.0) == 0.0 and c(1.0) == 1.0
    assert c(0.5) == 0.5
    assert c(1 / 3) == pytest.approx(0.5, abs=1e-6)
    assert c(0.25) == pytest.approx(1 / 3, abs=1e-6)  # 0.25 = 0.0202..._3
    assert cantor_cdf(4).n_plateaus == 15


def test_cantor_self_similarity():
    c = cantor_cdf(20)
    x = np.linspace(0, 1, 101)
    assert np.allclose(c(x / 3), c(x) / 2, atol=1e-6)
    assert np.allclose(c(1 - x), 1 - c(x), atol=1e-6)


def test_mixture_cdf():
    m = LebesgueMixture((0.0, 0.5, 0.5), (None, uniform().cdf, cantor_cdf(20)))
    assert mixture_cdf(m, 1.0) == pytest.approx(1.0)
    assert mixture_cdf(m, 0.5) == pytest.approx(0.5)
    with pytest.raises(InvalidDistributionError):
        LebesgueMixture((0.5, 0.6, 0.0))


def test_cdf_mode_checks_corner_and_monotonicity():
    with pytest.raises(InvalidDistributionError):
        ContinuousJoint("cdf", (0, 1, 0, 1), cdf=lambda x, y: 0.5 * np.clip(x, 0, 1) * np.clip(y, 0, 1))
    with pytest.raises(InvalidDistributionError):
        ContinuousJoint("cdf", (0, 1, 0, 1), cdf=lambda x, y: np.clip(x, 0, 1) * np.clip(y, 0, 1) * (1 + np.sin(12 * np.asarray(x)) * (1 - np.asarray(x))))


def test_product_joint_density_and_marginals():
    j = product_joint(normal(), exponential(2.0))
    assert j.density(0.0, 1.0) == pytest.approx(stats.norm.pdf(0) * stats.expon(scale=0.5).pdf(1.0))
    v = np.array([0.5, 1.0])
    assert np.allclose(j.marginal_density("y", v), stats.expon(scale=0.5).pdf(v))


def test_jacobian_of_ratio_product_map():
    # inverse map (y1, y2) -> (sqrt(y1 y2), sqrt(y2 / y1)) has |det| = 1 / (2 y1)
    y1, y2 = np.array([0.5, 2.0]), np.array([0.2, 0.3])
    assert np.allclose(numeric_jacobian_det(example9_inverse, y1, y2), 1 / (2 * y1), rtol=1e-5)


def test_mixed_joint_weight_validation():
    with pytest.raises(InvalidDistributionError):
        MixedJoint("y", (0.0, 1.0), (0.5, 0.6), lambda c, l: np.ones_like(c), (0.0, 1.0))
