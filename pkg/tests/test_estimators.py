import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from supportfactor.estimators import SupportEstimator, SupportIndependenceScreen
from supportfactor.exceptions import InvalidInputError


def _disk(n, seed=0):
    rng = np.random.default_rng(seed)
    t = rng.uniform(0, 2 * np.pi, n)
    r = np.sqrt(rng.random(n))
    return np.c_[r * np.cos(t), r * np.sin(t)]


def test_params_round_trip_through_clone():
    est = SupportIndependenceScreen(grid=32, min_count=2)
    twin = clone(est)
    assert twin.get_params() == est.get_params()


def test_support_estimator_fit_predict():
    X = _disk(20000)
    est = SupportEstimator(grid=64).fit(X)
    assert est.n_features_in_ == 2
    assert est.score(X) == 1.0
    assert not est.predict(np.array([[0.95, 0.95]]))[0]
    assert est.support_x_.hausdorff(est.support_y_) < 0.1


def test_support_estimator_requires_fit():
    with pytest.raises(NotFittedError):
        SupportEstimator().predict(np.zeros((1, 2)))


def test_screen_continuous_dependent_and_independent():
    dep = SupportIndependenceScreen(grid=32).fit(_disk(20000))
    assert dep.mode_ == "grid" and dep.screening_ == "DependentBySupport"
    rng = np.random.default_rng(1)
    ind = SupportIndependenceScreen(grid=32).fit(rng.random((20000, 2)))
    assert ind.screening_ == "Inconclusive"


def test_screen_discrete_mode():
    rng = np.random.default_rng(2)
    vals = np.array([4.0, 5.0, 7.0])
    draws = np.array([rng.choice(vals, 2, replace=False) for _ in range(500)])
    est = SupportIndependenceScreen().fit(draws)
    assert est.mode_ == "discrete"
    assert est.screening_ == "DependentBySupport"
    assert sorted((w["x"], w["y"]) for w in est.witnesses_) == [(4.0, 4.0), (5.0, 5.0), (7.0, 7.0)]


def test_screen_rejects_bad_input():
    with pytest.raises(InvalidInputError):
        SupportIndependenceScreen().fit(np.zeros((10, 3)))
    with pytest.raises(InvalidInputError):
        SupportIndependenceScreen(discrete="sometimes").fit(np.zeros((10, 2)))
