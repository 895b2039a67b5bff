"""Structural bound factors: composition, anchors, invariances."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wsumdist.bounds import (
    BlockSpec,
    MomentMismatchError,
    OddSError,
    bound_iid,
    bound_independent,
    bound_independent_sym,
    bound_markov,
    bound_nb,
    check_assumptions,
    lemma_fg_gap,
    lemma_fg_gap_sym,
)
from wsumdist.checks import gen_matched_pair
from wsumdist.lattice import from_entries
from wsumdist.markov import MBParams

F = from_entries({0: 0.375, 1: 0.5, 4: 0.125})
G = from_entries({0: 0.45, 1: 0.25, 2: 0.25, 5: 0.05})

TWO_BLOCKS = [BlockSpec.iid(F, G, 10), BlockSpec.iid(F, G, 100)]


class TestBlockSpec:
    def test_iid_flag(self):
        assert BlockSpec.iid(F, G, 4).is_iid
        spec = BlockSpec.from_summands((F, F, G), (G, G, G))
        assert not spec.is_iid
        assert spec.n == 3

    def test_validation(self):
        with pytest.raises(ValueError):
            BlockSpec.iid(F, G, 0)
        with pytest.raises(ValueError):
            BlockSpec.iid(F, G, 4, weight=0.0)
        with pytest.raises(ValueError):
            BlockSpec(f=F, g=G, n=2, f_list=(F, F), g_list=None)
        with pytest.raises(ValueError):
            BlockSpec.iid(F - G, G, 4)  # signed summand rejected


class TestCheckAssumptions:
    def test_matched_through_three(self):
        report = check_assumptions(TWO_BLOCKS, 3)
        assert report.ok
        assert report.warnings == ()

    def test_order_four_mismatch_warned(self):
        # fourth factorial moments differ (3 vs 6), so s = 4 must warn
        report = check_assumptions(TWO_BLOCKS, 4)
        assert not report.ok
        assert any("order 4" in w for w in report.warnings)

    def test_identical_pair_any_order(self):
        assert check_assumptions([BlockSpec.iid(F, F, 5)], 4).ok

    def test_validation(self):
        with pytest.raises(ValueError):
            check_assumptions(TWO_BLOCKS, 0)
        with pytest.raises(ValueError):
            check_assumptions([], 3)


class TestBoundIid:
    def test_anchor_equal_weights(self):
        report = bound_iid(TWO_BLOCKS, 3)
        assert report.components["u_total"] == pytest.approx(41.25, abs=1e-12)
        assert report.factor == pytest.approx(2.539888662414866, abs=1e-13)

    def test_anchor_weighted(self):
        blocks = [
            BlockSpec.iid(F, G, 10, weight=1.0),
            BlockSpec.iid(F, G, 100, weight=math.sqrt(2.0)),
        ]
        report = bound_iid(blocks, 3)
        assert report.factor == pytest.approx(3.5919449933047636, abs=1e-13)
        assert report.components["factor.weight_ratio"] == pytest.approx(
            math.sqrt(2.0), abs=1e-15
        )

    def test_recompose_exact(self):
        report = bound_iid(TWO_BLOCKS, 3)
        assert report.recompose() == report.factor

    @pytest.mark.parametrize("c", [0.5, 3.0])
    def test_weight_scale_invariance(self, c):
        base = bound_iid(TWO_BLOCKS, 3).factor
        scaled = [
            BlockSpec.iid(F, G, 10, weight=c),
            BlockSpec.iid(F, G, 100, weight=c),
        ]
        assert bound_iid(scaled, 3).factor == pytest.approx(base, rel=1e-14)

    def test_non_iid_block_rejected(self):
        spec = BlockSpec.from_summands((F, G), (G, G))
        with pytest.raises(ValueError):
            bound_iid([spec], 3)

    def test_json_round_trip_fields(self):
        payload = bound_iid(TWO_BLOCKS, 3).to_json_dict()
        assert payload["absolute_constant_excluded"] is True
        assert payload["factor"] == pytest.approx(2.539888662414866, abs=1e-13)
        assert "factor.beta_term" in payload["components"]


class TestBoundIndependent:
    def test_consistent_with_iid_route(self):
        # same blocks, general route carries the variance product (25.0)
        general = bound_independent(TWO_BLOCKS, 3)
        special = bound_iid(TWO_BLOCKS, 3)
        assert general.components["factor.variance_product"] == pytest.approx(
            25.0, abs=1e-12
        )
        assert general.factor == pytest.approx(25.0 * special.factor, rel=1e-12)

    def test_per_summand_lists(self):
        spec = BlockSpec.from_summands((F, G, F), (G, G, G))
        report = bound_independent([spec], 1)
        assert report.factor > 0.0
        assert report.recompose() == report.factor


class TestBoundIndependentSym:
    def test_odd_s_rejected(self):
        with pytest.raises(OddSError):
            bound_independent_sym(TWO_BLOCKS, 3)

    def test_even_s_composes(self):
        report = bound_independent_sym(TWO_BLOCKS, 2)
        assert report.factor > 0.0
        assert report.recompose() == report.factor
        assert "factor.sym_term" in report.components


class TestBoundNb:
    def test_bracket_and_overlap(self):
        report = bound_nb([BlockSpec.iid(F, F, 10)])
        assert report.components["block0.bracket"] == pytest.approx(5.75, abs=1e-12)
        assert report.components["block0.u_tilde"] == pytest.approx(0.375, abs=1e-12)
        assert report.factor == pytest.approx(7.918099285579609, abs=1e-12)

    def test_dual_route_agreement(self):
        # r ln(1/p~) from matched params and from block factorial moments
        report = bound_nb([BlockSpec.iid(F, F, 10)])
        direct = report.components["block0.r_log_direct"]
        via_moments = report.components["block0.r_log_moments"]
        assert direct == pytest.approx(via_moments, abs=1e-12)

    def test_negative_support_rejected(self):
        signed = from_entries({-1: 0.5, 1: 0.5})
        with pytest.raises(ValueError):
            bound_nb([BlockSpec.iid(signed, signed, 5)])

    def test_weight_ratio_carried(self):
        blocks = [
            BlockSpec.iid(F, F, 10, weight=1.0),
            BlockSpec.iid(F, F, 10, weight=3.0),
        ]
        assert bound_nb(blocks).components["factor.weight_ratio"] == pytest.approx(
            3.0, abs=1e-15
        )


class TestBoundMarkov:
    def test_anchor(self):
        report = bound_markov([(MBParams(p=0.3, q_bar=0.02, n=100), 1.0)])
        assert report.factor == pytest.approx(0.004525483399593904, abs=1e-15)
        assert report.warnings == ()

    def test_horizon_clamp(self):
        # every n_k q_bar_k <= 1 clamps each term to 1, denominator sqrt(N)
        pairs = [
            (MBParams(p=0.3, q_bar=0.005, n=100), 1.0),
            (MBParams(p=0.2, q_bar=0.008, n=50), 1.0),
        ]
        report = bound_markov(pairs)
        assert report.components["horizon_total"] == pytest.approx(2.0, abs=1e-15)
        assert report.components["factor.horizon_inv_sqrt"] == pytest.approx(
            1.0 / math.sqrt(2.0), abs=1e-15
        )

    def test_regime_violation_warned(self):
        report = bound_markov([(MBParams(p=0.7, q_bar=0.02, n=100), 1.0)])
        assert any("p_in_range" in w for w in report.warnings)

    def test_validation(self):
        with pytest.raises(ValueError):
            bound_markov([])
        with pytest.raises(ValueError):
            bound_markov([(MBParams(p=0.3, q_bar=0.02, n=100), -1.0)])


class TestFgGap:
    def test_example_values(self):
        gap, cap = lemma_fg_gap(F, G, 3)
        assert gap == pytest.approx(0.75, abs=1e-15)
        assert cap == pytest.approx(6.0, abs=1e-12)
        assert gap <= cap

    def test_identical_pair(self):
        gap, cap = lemma_fg_gap(F, F, 3)
        assert gap == 0.0
        assert cap > 0.0

    def test_mismatch_rejected(self):
        with pytest.raises(MomentMismatchError):
            lemma_fg_gap(F, from_entries({0: 0.5, 1: 0.5}), 3)

    @given(
        st.integers(min_value=0, max_value=2**32 - 1),
        st.sampled_from((1, 2, 3)),
    )
    @settings(max_examples=120, deadline=None)
    def test_random_matched_pairs_capped(self, seed, s):
        f, g = gen_matched_pair(seed, s)
        gap, cap = lemma_fg_gap(f, g, s)
        assert gap <= cap * (1.0 + 1e-12) + 1e-15

    def test_sym_example_values(self):
        residual, cap = lemma_fg_gap_sym(F, G, 2)
        assert residual == pytest.approx(7.6, abs=1e-12)
        assert cap == pytest.approx(144.0, abs=1e-12)

    def test_sym_odd_s_rejected(self):
        with pytest.raises(OddSError):
            lemma_fg_gap_sym(F, G, 3)
