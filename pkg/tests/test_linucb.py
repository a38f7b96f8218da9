import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from subbandit.linucb import (
    REFACTOR_EVERY,
    BetaSchedule,
    ConfigError,
    Scorer,
    UcbState,
    beta,
    check_lambda,
    list_ucb,
    mean_and_width,
    modified_ucb,
    ucb,
)
from subbandit.submod_core import CoverageProfile, feature_vector


def dense_oracle(lam, X, y):
    d = X.shape[1]
    M = lam * np.eye(d) + X.T @ X
    b = X.T @ y
    sign, ld = np.linalg.slogdet(M / lam)
    assert sign > 0
    return M, np.linalg.inv(M), b, ld


class TestObserve:
    def test_zero_vector(self):
        st_ = UcbState(3, 1.0)
        st_.observe(np.zeros(3), 2.0)
        assert st_.obs_count == 1
        np.testing.assert_array_equal(st_.M, np.eye(3))
        np.testing.assert_array_equal(st_.b, np.zeros(3))
        assert st_.logdet == 0.0

    def test_single_unit(self):
        st_ = UcbState(3, 1.0)
        st_.observe([1.0, 0, 0], 1.0)
        np.testing.assert_allclose(st_.w, [0.5, 0, 0])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            UcbState(3, 1.0).observe([1.0, 0.0], 1.0)

    def test_bad_lambda(self):
        with pytest.raises(ConfigError):
            UcbState(3, 0.0)

    def test_matches_dense_after_50(self):
        rng = np.random.default_rng(0)
        X, y = rng.uniform(size=(50, 4)), rng.normal(size=50)
        st_ = UcbState(4, 0.7)
        for x, v in zip(X, y):
            st_.observe(x, v)
        M, M_inv, b, ld = dense_oracle(0.7, X, y)
        np.testing.assert_allclose(st_.M_inv, M_inv, atol=1e-8)
        np.testing.assert_allclose(st_.w, M_inv @ b, atol=1e-8)
        assert st_.logdet == pytest.approx(ld, abs=1e-8)

    def test_refactor_boundary(self):
        rng = np.random.default_rng(1)
        st_ = UcbState(5, 1.0)
        X = rng.uniform(size=(REFACTOR_EVERY + 3, 5))
        st_.observe_many(X, np.ones(len(X)))
        np.testing.assert_allclose(st_.M_inv @ st_.M, np.eye(5), atol=1e-8)
        assert st_.last_batch == len(X)

    def test_logdet_monotone(self):
        rng = np.random.default_rng(2)
        st_ = UcbState(3, 0.5)
        prev = 0.0
        for _ in range(40):
            st_.observe(rng.uniform(size=3), 1.0)
            assert st_.logdet >= prev
            prev = st_.logdet


class TestMeanAndWidth:
    def test_fresh_mean(self):
        mu, _ = mean_and_width(UcbState(3, 2.0), np.ones(3))
        assert mu == 0.0

    def test_fresh_width(self):
        _, sigma = mean_and_width(UcbState(3, 1.0), np.array([0.0, 1.0, 0.0]))
        assert sigma == pytest.approx(1.0)

    def test_matches_solve(self):
        rng = np.random.default_rng(4)
        X, y = rng.uniform(size=(30, 3)), rng.uniform(size=30)
        st_ = UcbState(3, 1.0).observe_many(X, y)
        M, _, b, _ = dense_oracle(1.0, X, y)
        x = rng.uniform(size=3)
        mu, sigma = mean_and_width(st_, x)
        assert mu == pytest.approx(float(x @ np.linalg.solve(M, b)), abs=1e-10)
        assert sigma == pytest.approx(math.sqrt(x @ np.linalg.solve(M, x)), abs=1e-10)

    def test_sigma_shrinks(self):
        st_ = UcbState(2, 1.0)
        x = np.array([0.3, 0.8])
        prev = mean_and_width(st_, x)[1]
        for _ in range(10):
            st_.observe(x, 0.0)
            cur = mean_and_width(st_, x)[1]
            assert cur < prev
            prev = cur

    def test_scorer_matches_state(self):
        rng = np.random.default_rng(5)
        st_ = UcbState(3, 1.0).observe_many(rng.uniform(size=(10, 3)), rng.uniform(size=10))
        X = rng.uniform(size=(6, 3))
        sc = st_.scorer(0.3)
        mu, sigma = sc.evaluate(X)
        for i, x in enumerate(X):
            m, s = st_.mean_and_width(x)
            assert mu[i] == pytest.approx(m, abs=1e-12)
            assert sigma[i] == pytest.approx(s, abs=1e-12)
        assert sc.n_evals == 6

    def test_exact_scorer(self):
        sc = Scorer.exact(np.array([1.0, 2.0]))
        np.testing.assert_allclose(sc.ucb(np.array([[0.5, 0.5]])), [1.5])


class TestBeta:
    def test_theoretical_no_radical(self):
        s = BetaSchedule("theoretical", B=1.0, R=0.0, delta=0.3)
        assert beta(s, UcbState(2, 1.0)) == 1.0

    def test_theoretical_fresh(self):
        s = BetaSchedule("theoretical", B=0.5, R=0.2, delta=0.1)
        expect = 0.5 + 0.2 * math.sqrt(2 + 2 * math.log(10))
        assert beta(s, UcbState(2, 1.0)) == pytest.approx(expect, abs=1e-15)

    def test_theoretical_nondecreasing(self):
        rng = np.random.default_rng(6)
        s = BetaSchedule("theoretical", B=0.1, R=0.5)
        st_ = UcbState(3, 1.0)
        prev = beta(s, st_)
        for _ in range(30):
            st_.observe(rng.uniform(size=3), 0.0)
            assert beta(s, st_) >= prev
            prev = beta(s, st_)

    def test_practical_movielens_settings(self):
        rng = np.random.default_rng(7)
        s = BetaSchedule("practical", B=0.01, R1=0.1, R2=1.0)
        st_ = UcbState(18, 1.0)
        prev = beta(s, st_)
        assert prev > 0
        for _ in range(100):
            st_.observe(rng.uniform(size=18), 0.0)
            assert beta(s, st_) >= prev
            prev = beta(s, st_)

    def test_practical_formula(self):
        st_ = UcbState(4, 1.0).observe_many(np.ones((10, 4)), np.zeros(10))
        s = BetaSchedule("practical", B=0.01, R1=0.1, R2=2.0, delta=0.2)
        expect = 0.01 + 0.1 * math.sqrt(2.0 * 4 * math.log(10) + 1 + math.log(5))
        assert beta(s, st_) == pytest.approx(expect, abs=1e-15)

    def test_practical_alternative_readings(self):
        st_ = UcbState(4, 1.0).observe_many(np.ones((10, 4)), np.zeros(10))
        st_.observe_many(np.ones((3, 4)), np.zeros(3))
        s = BetaSchedule("practical", B=0.0, R1=1.0, R2=1.0, delta=0.5, dim="k", count="slate", k=2)
        assert beta(s, st_) == pytest.approx(math.sqrt(2 * math.log(3) + 1 + math.log(2)), abs=1e-15)

    @pytest.mark.parametrize("delta", [0.0, 1.0, -0.1, 2.0])
    def test_bad_delta(self, delta):
        with pytest.raises(ConfigError):
            BetaSchedule(delta=delta)

    def test_bad_variant(self):
        with pytest.raises(ConfigError):
            BetaSchedule("optimistic")


class TestUcb:
    def test_zero_beta(self):
        st_ = UcbState(2, 1.0).observe([1.0, 0.0], 0.7)
        s = BetaSchedule("fixed", B=0.0)
        assert ucb(st_, s, [1.0, 0.0]) == pytest.approx(mean_and_width(st_, [1.0, 0.0])[0])

    def test_fresh_unit(self):
        s = BetaSchedule("theoretical", B=1.0, R=0.0)
        assert ucb(UcbState(3, 1.0), s, [0, 1.0, 0]) == pytest.approx(1.0)

    def test_modified_halves(self):
        st_ = UcbState(2, 1.0).observe([0.2, 0.4], 1.0)
        s = BetaSchedule("fixed", B=0.5)
        x = [0.3, 0.1]
        assert modified_ucb(st_, s, x, 2.0) == pytest.approx(ucb(st_, s, x) / 2)

    def test_modified_rejects_nonpositive_cost(self):
        with pytest.raises(ValueError):
            modified_ucb(UcbState(2, 1.0), BetaSchedule(), [1.0, 0.0], 0.0)


class TestListUcb:
    def setup_method(self):
        rng = np.random.default_rng(8)
        self.prof = CoverageProfile(rng.uniform(size=(6, 3)))
        self.state = UcbState(3, 1.0).observe_many(rng.uniform(size=(12, 3)), rng.uniform(size=12))
        self.sched = BetaSchedule("fixed", B=0.2)

    def test_empty(self):
        assert list_ucb(self.state, self.sched, [], self.prof) == 0.0

    def test_single(self):
        mu, sigma = mean_and_width(self.state, self.prof.p[2])
        assert list_ucb(self.state, self.sched, [2], self.prof) == pytest.approx(mu + 0.6 * sigma)

    def test_three_positions(self):
        slate = [4, 0, 5]
        total = 0.0
        for i, e in enumerate(slate):
            mu, sigma = mean_and_width(self.state, feature_vector(self.prof, e, slate[:i]))
            total += mu + 3 * 0.2 * sigma
        assert list_ucb(self.state, self.sched, slate, self.prof) == pytest.approx(total, abs=1e-12)


def test_check_lambda_warns():
    with pytest.warns(UserWarning):
        assert not check_lambda(1.0, 5)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert check_lambda(5.0, 5)


@given(st.integers(1, 6), st.floats(0.05, 10.0), st.integers(0, 2**31))
def test_inverse_identity_random(d, lam, seed):
    rng = np.random.default_rng(seed)
    st_ = UcbState(d, lam)
    X = rng.normal(size=(40, d))
    st_.observe_many(X, rng.normal(size=40))
    assert np.abs(st_.M_inv @ st_.M - np.eye(d)).max() <= 1e-8
    _, _, _, ld = dense_oracle(lam, X, np.zeros(40))
    assert st_.logdet == pytest.approx(ld, abs=1e-8)
