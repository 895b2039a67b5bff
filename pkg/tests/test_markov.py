"""Markov-Binomial tests: DP law vs path enumeration, simulation, assumptions."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wsumdist.lattice import LatticeMeasure, from_entries, moments, tv_norm
from wsumdist.markov import Cond1Report, MBParams, cond1_check, mb_pmf, mb_simulate


def _enumerate_law(params: MBParams) -> LatticeMeasure:
    # Brute force over all 2^n sample paths; X_0 = 0 so the first step
    # leaves state 0 with probability q_bar.
    p, q_bar, n = params.p, params.q_bar, params.n
    q = 1.0 - p
    probs = np.zeros(n + 1)
    for path in itertools.product((0, 1), repeat=n):
        weight = 1.0
        prev = 0
        for x in path:
            if prev == 0:
                weight *= q_bar if x == 1 else 1.0 - q_bar
            else:
                weight *= p if x == 1 else q
            prev = x
        probs[sum(path)] += weight
    return from_entries({k: probs[k] for k in range(n + 1)})


class TestMbPmf:
    def test_single_step(self):
        law = mb_pmf(MBParams(p=0.3, q_bar=0.02, n=1))
        assert law.mass_at(0) == pytest.approx(0.98, abs=1e-15)
        assert law.mass_at(1) == pytest.approx(0.02, abs=1e-15)

    def test_two_steps_closed_form(self):
        # P(0) = (1-q_bar)^2, P(2) = q_bar*p, P(1) the rest
        law = mb_pmf(MBParams(p=0.3, q_bar=0.02, n=2))
        assert law.mass_at(0) == pytest.approx(0.9604, abs=1e-15)
        assert law.mass_at(1) == pytest.approx(0.0336, abs=1e-15)
        assert law.mass_at(2) == pytest.approx(0.006, abs=1e-15)

    @pytest.mark.parametrize(
        "p,q_bar,n",
        [(0.3, 0.02, 8), (0.5, 0.5, 10), (0.9, 0.1, 12), (0.2, 0.7, 9)],
    )
    def test_against_path_enumeration(self, p, q_bar, n):
        params = MBParams(p=p, q_bar=q_bar, n=n)
        assert tv_norm(mb_pmf(params) - _enumerate_law(params)) <= 1e-12

    def test_independent_case_is_binomial(self):
        # p = q_bar makes both rows of the kernel equal, so every step is an
        # independent coin with P(1) = q_bar and the count is Binomial
        q_bar, n = 0.25, 40
        law = mb_pmf(MBParams(p=q_bar, q_bar=q_bar, n=n))
        binom = {
            k: math.comb(n, k) * q_bar**k * (1.0 - q_bar) ** (n - k)
            for k in range(n + 1)
        }
        assert tv_norm(law - from_entries(binom)) <= 1e-12

    @given(
        st.floats(min_value=0.01, max_value=0.99),
        st.floats(min_value=0.01, max_value=0.99),
        st.integers(min_value=1, max_value=60),
    )
    @settings(max_examples=50, deadline=None)
    def test_is_probability_law(self, p, q_bar, n):
        law = mb_pmf(MBParams(p=p, q_bar=q_bar, n=n))
        assert abs(law.total_mass - 1.0) <= 1e-12
        assert np.all(law.masses >= 0)
        assert law.support.min() >= 0 and law.support.max() <= n

    def test_mean_increasing_in_q_bar(self):
        means = [
            moments(mb_pmf(MBParams(p=0.3, q_bar=q, n=50))).mean
            for q in (0.01, 0.05, 0.2, 0.5)
        ]
        assert all(a < b for a, b in zip(means, means[1:]))

    def test_param_validation(self):
        with pytest.raises(ValueError):
            MBParams(p=1.0, q_bar=0.5, n=10)
        with pytest.raises(ValueError):
            MBParams(p=0.5, q_bar=0.0, n=10)
        with pytest.raises(ValueError):
            MBParams(p=0.5, q_bar=0.5, n=0)


class TestMbSimulate:
    def test_matches_exact_law(self):
        params = MBParams(p=0.3, q_bar=0.02, n=20)
        emp = mb_simulate(params, 1_000_000, seed=7)
        exact = mb_pmf(params)
        s = moments(exact)
        # CLT band on the empirical mean: 6 sigma / sqrt(draws)
        band = 6.0 * math.sqrt(s.variance / 1_000_000)
        assert moments(emp).mean == pytest.approx(s.mean, abs=band)
        assert abs(emp.total_mass - 1.0) <= 1e-12

    def test_seed_determinism(self):
        params = MBParams(p=0.4, q_bar=0.3, n=10)
        a = mb_simulate(params, 10_000, seed=11)
        b = mb_simulate(params, 10_000, seed=11)
        assert tv_norm(a - b) == 0.0

    def test_generator_seed_accepted(self):
        params = MBParams(p=0.4, q_bar=0.3, n=10)
        emp = mb_simulate(params, 1_000, seed=np.random.default_rng(3))
        assert abs(emp.total_mass - 1.0) <= 1e-12

    def test_draw_validation(self):
        with pytest.raises(ValueError):
            mb_simulate(MBParams(p=0.4, q_bar=0.3, n=10), 0, seed=1)


class TestCond1Check:
    def test_reference_regime_passes(self):
        report = cond1_check(MBParams(p=0.3, q_bar=0.02, n=100))
        assert isinstance(report, Cond1Report)
        assert report.satisfied
        assert report.violated_clauses == []

    def test_large_p_flagged(self):
        report = cond1_check(MBParams(p=0.6, q_bar=0.05, n=100))
        assert not report.satisfied
        assert "p_in_range" in report.violated_clauses

    def test_large_q_bar_flagged(self):
        report = cond1_check(MBParams(p=0.3, q_bar=0.4, n=100), k0=2)
        assert not report.satisfied
        assert "q_bar_small" in report.violated_clauses

    def test_tiny_q_bar_flagged(self):
        report = cond1_check(MBParams(p=0.3, q_bar=1e-9, n=100), k0=2)
        assert not report.satisfied
        assert "q_bar_not_tiny" in report.violated_clauses

    def test_nonpositive_weight_flagged(self):
        report = cond1_check(MBParams(p=0.3, q_bar=0.02, n=100), w=0.0)
        assert not report.satisfied
        assert "weight_positive" in report.violated_clauses

    def test_k0_loosens_switch_rate_floor(self):
        # floor is n^(-k0): raising k0 admits rarer switching
        params = MBParams(p=0.3, q_bar=1e-5, n=100)
        at_2 = cond1_check(params, k0=2)
        at_3 = cond1_check(params, k0=3)
        assert "q_bar_not_tiny" in at_2.violated_clauses
        assert at_3.satisfied

    def test_k0_validation(self):
        with pytest.raises(ValueError):
            cond1_check(MBParams(p=0.3, q_bar=0.02, n=100), k0=1)
