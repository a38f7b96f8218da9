import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from subbandit.constraints import ConstraintError, ConstraintSystem, KSystem, PartitionMatroid, UniformMatroid, build_constraints
from subbandit.linucb import ConfigError, Scorer
from subbandit.oracle import (
    OracleError,
    RegretLedger,
    alpha_from_config,
    brute_force_opt,
    brute_force_unpruned,
    offline_greedy_ksystem,
    record_round,
)
from subbandit.policies import ThresholdSchedule, afsm_ucb_round, c_greedy_round, lsb_greedy_round
from subbandit.submod_core import CoverageProfile, LinearSubmodularModel, ModularValueModel

from conftest import random_constraints, random_model


class TestBruteForce:
    def test_single_feasible_item(self):
        m = ModularValueModel([0.4, 0.9, 0.2])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            cs = build_constraints(3, [[0.5, 2.0, 3.0]], [1.0])
        assert brute_force_opt(m, cs) == ([0], pytest.approx(0.4))

    def test_cardinality_one_modular(self):
        m = ModularValueModel([0.4, 0.9, 0.2, 0.9])
        best, val = brute_force_opt(m, build_constraints(4, cardinality=1))
        assert best == [1] and val == pytest.approx(0.9)

    def test_beats_random_feasible_sets(self, rng):
        m = random_model(rng, 10, 3)
        cs = random_constraints(rng, m, l=1, cardinality=4)
        _, val = brute_force_opt(m, cs)
        for _ in range(50):
            s = []
            for e in rng.permutation(10):
                if rng.uniform() < 0.5 and cs.feasible(s + [int(e)]):
                    s.append(int(e))
            assert val >= m.value(s) - 1e-12

    def test_refuses_large(self):
        m = ModularValueModel(np.ones(21))
        with pytest.raises(OracleError):
            brute_force_opt(m, build_constraints(21, cardinality=2))

    def test_tie_lexicographic(self):
        m = ModularValueModel([0.5, 0.5, 0.5])
        assert brute_force_opt(m, build_constraints(3, cardinality=2))[0] == [0, 1]

    def test_dominates_policies(self, rng):
        for _ in range(10):
            m = random_model(rng, 10, 3)
            cs = random_constraints(rng, m, l=1, cardinality=4)
            _, val = brute_force_opt(m, cs)
            ts = ThresholdSchedule.for_constraints(cs, 0.01, 1.0, 0.3)
            sc = Scorer.exact(m.weights)
            for dec in (afsm_ucb_round(sc, ts, cs, m.profile), lsb_greedy_round(sc, cs, m.profile),
                        c_greedy_round(sc, cs, m.profile)):
                assert val >= m.value(dec.slate) - 1e-12


@given(st.integers(0, 2**31))
def test_pruned_equals_unpruned(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 11))
    m = random_model(rng, n, 3)
    cs = random_constraints(rng, m, l=int(rng.integers(0, 3)), cardinality=int(rng.integers(1, n + 1)))
    a, va = brute_force_opt(m, cs)
    b, vb = brute_force_unpruned(m, cs)
    assert va == pytest.approx(vb, abs=1e-12)
    assert cs.feasible(a)


class TestOfflineGreedy:
    def test_uniform_one(self, rng):
        m = random_model(rng, 6, 3)
        s = offline_greedy_ksystem(m, KSystem((UniformMatroid(6, 1),)))
        assert s == [int(np.argmax(m.singleton_values()))]

    def test_half_of_opt_single_partition(self, rng):
        for _ in range(20):
            n = 10
            m = random_model(rng, n, 3)
            pm = PartitionMatroid(rng.integers(0, 3, size=n), rng.integers(1, 3, size=3))
            s = offline_greedy_ksystem(m, KSystem((pm,)))
            cs = ConstraintSystem(n, (), KSystem((pm,)))
            assert m.value(s) >= brute_force_opt(m, cs)[1] / 2 - 1e-12

    def test_zero_limits(self, rng):
        m = random_model(rng, 5, 2)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            s = offline_greedy_ksystem(m, KSystem((PartitionMatroid(np.zeros(5, int), [0]),)))
        assert s == []

    def test_rejects_knapsacks(self, rng):
        m = random_model(rng, 4, 2)
        with pytest.raises(ConstraintError):
            offline_greedy_ksystem(m, build_constraints(4, [[0.1] * 4], [1.0]))


class TestAlpha:
    def test_eps_zero(self):
        assert alpha_from_config(1, 1, 0.0) == pytest.approx(0.25)

    def test_news_shape(self):
        assert alpha_from_config(1, 1, 0.3) == pytest.approx(1 / 5.2)

    def test_movielens_shape(self):
        assert alpha_from_config(18, 1, 1.0) == pytest.approx(1 / 42)

    def test_bad_k(self):
        with pytest.raises(ConfigError):
            alpha_from_config(0, 1, 0.3)


class TestLedger:
    def test_zero_increment(self):
        led = RegretLedger(0.25, 2.0)
        record_round(led, 0.5)
        assert led.per_round == [(0.5, 0.0)] and led.cumulative == 0.0

    def test_empty_slate(self):
        led = RegretLedger(0.25, 2.0)
        led.record_round(0.0)
        assert led.cumulative == 0.5

    def test_constant_rounds(self):
        led = RegretLedger(0.2, 3.0)
        for _ in range(100):
            led.record_round(0.1)
        assert led.cumulative == pytest.approx(100 * (0.6 - 0.1), abs=1e-9)

    def test_negative_increments(self):
        led = RegretLedger(0.2, 1.0)
        led.record_round(0.9)
        assert led.cumulative == pytest.approx(-0.7)

    @given(st.lists(st.floats(0, 5), max_size=60))
    def test_recompute_bitwise(self, fs):
        led = RegretLedger(0.3, 4.0)
        for f in fs:
            led.record_round(f)
        assert led.recompute() == led.cumulative
