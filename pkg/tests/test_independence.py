import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from supportfactor.distributions import DiscreteJoint, normal, product_joint, uniform
from supportfactor.exceptions import InvalidInputError, NumericError
from supportfactor.independence import (
    CONSISTENT,
    DEPENDENT,
    DEPENDENT_BY_SUPPORT,
    INCONCLUSIVE,
    INDEPENDENT,
    Verdict,
    cdf_factorization_probe,
    check,
    conditional_support_check,
    continuous_factorization_probe,
    discrete_factorization_oracle,
    nary_discrete_check,
    necessary_condition,
)
from supportfactor.registry import darts_uniform
from supportfactor.support import support


def test_verdict_vocabulary_and_contradiction():
    with pytest.raises(InvalidInputError):
        Verdict("Maybe", None, 0.0, 0.0, (), ())
    with pytest.raises(NumericError) as exc:
        Verdict(DEPENDENT_BY_SUPPORT, INDEPENDENT, 1.0, 1.0, (), ())
    assert exc.value.exit_code == 4


def _table(probs: np.ndarray) -> DiscreteJoint:
    n, m = probs.shape
    xs, ys = np.meshgrid(np.arange(n, dtype=float), np.arange(m, dtype=float), indexing="ij")
    return DiscreteJoint.from_arrays(xs, ys, probs / math.fsum(probs.ravel()))


weights = st.lists(st.floats(min_value=0.01, max_value=1.0), min_size=2, max_size=6)


@settings(max_examples=100, deadline=None)
@given(weights, weights)
def test_independent_tables_never_screen_dependent(wx, wy):
    px, py = np.array(wx) / sum(wx), np.array(wy) / sum(wy)
    _, v = check(_table(np.outer(px, py)), oracle="exact")
    assert v.screening == INCONCLUSIVE
    assert v.oracle == INDEPENDENT


cells = st.lists(st.sampled_from([0.0, 0.0, 0.1, 0.3, 0.7, 1.0]), min_size=25, max_size=25)


@settings(max_examples=150, deadline=None)
@given(cells)
def test_support_failure_implies_dependence(c):
    probs = np.array(c).reshape(5, 5)
    if probs.sum() == 0:
        return
    j = _table(probs)
    rep = support(j)
    screen = necessary_condition(rep.s_xy, rep.s_x, rep.s_y)
    if screen.screening == DEPENDENT_BY_SUPPORT:
        assert discrete_factorization_oracle(j).outcome == DEPENDENT


@settings(max_examples=150, deadline=None)
@given(cells)
def test_conditional_and_product_screens_agree(c):
    probs = np.array(c).reshape(5, 5)
    if probs.sum() == 0:
        return
    j = _table(probs)
    rep = support(j)
    assert necessary_condition(rep.s_xy, rep.s_x, rep.s_y).screening == conditional_support_check(j).screening


def test_parity_table_screens_dependent():
    j = DiscreteJoint((((0, 0), 0.5), ((1, 1), 0.5)))
    _, v = check(j, oracle="exact")
    assert v.screening == DEPENDENT_BY_SUPPORT
    assert sorted((w["x"], w["y"]) for w in v.witnesses if w["kind"] == "support") == [(0.0, 1.0), (1.0, 0.0)]
    assert v.oracle == DEPENDENT


def test_nary_check():
    cube = [(pt, 1 / 8) for pt in itertools.product((0, 1), repeat=3)]
    assert nary_discrete_check(cube).screening == INCONCLUSIVE
    # X3 = X1 xor X2: pairwise independent, jointly dependent
    xor = [((a, b, a ^ b), 0.25) for a in (0, 1) for b in (0, 1)]
    v = nary_discrete_check(xor)
    assert v.screening == DEPENDENT_BY_SUPPORT and v.gap == 4
    with pytest.raises(InvalidInputError):
        nary_discrete_check([((0,), 1.0)])


def test_density_probe_darts_origin():
    res = continuous_factorization_probe(darts_uniform(), probe_points=[(0.0, 0.0)])
    w = res.worst
    assert w["lhs"] == pytest.approx(1 / math.pi)
    assert w["rhs"] == pytest.approx(4 / math.pi**2, abs=1e-4)
    assert res.outcome == DEPENDENT


@pytest.mark.parametrize("joint", [product_joint(normal(), normal()), product_joint(uniform(), uniform())])
def test_product_joints_consistent(joint):
    _, v = check(joint, oracle="probe", grid=64)
    assert v.screening == INCONCLUSIVE
    assert v.oracle == CONSISTENT


def test_cdf_probe_on_product_and_comonotone():
    F1 = lambda x, y: np.clip(x, 0, 1) * np.clip(y, 0, 1)
    Fm = lambda x, y: np.minimum(np.clip(x, 0, 1), np.clip(y, 0, 1))
    Fx = lambda v: np.clip(v, 0, 1)
    pts = [(0.3, 0.6), (0.5, 0.5)]
    assert cdf_factorization_probe(F1, Fx, Fx, pts).outcome == CONSISTENT
    res = cdf_factorization_probe(Fm, Fx, Fx, pts)
    assert res.outcome == DEPENDENT
    assert res.max_residual == pytest.approx(0.25)


def test_check_rejects_unknown_oracle():
    with pytest.raises(InvalidInputError):
        check(darts_uniform(), oracle="magic", grid=32)
