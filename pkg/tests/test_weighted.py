"""Weighted-measure tests: lifting, convolution, Kolmogorov distance."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wsumdist.lattice import (
    char_fn,
    delta,
    from_entries,
    kolmogorov_norm,
    power,
    tv_norm,
)
from wsumdist.weighted import (
    ResourceLimitError,
    WeightBasis,
    WeightedMeasure,
    lift,
    wconcentration,
    wconvolve,
    weighted_sum_distribution,
    wkolmogorov_distance,
)

F = from_entries({0: 0.375, 1: 0.5, 4: 0.125})
G = from_entries({0: 0.45, 1: 0.25, 2: 0.25, 5: 0.05})
SQRT2 = math.sqrt(2.0)
BASIS = WeightBasis((1.0, SQRT2))

# Frozen by an exhaustive-enumeration oracle (verify_frozen_constant below).
N4_DISTANCE = 0.05078889624023434


def _enumeration_distance(f, g, sizes, weights):
    """CDF distance via brute-force outcome enumeration, no library calls."""
    per_block_f = [power(f, n).as_dict() for n in sizes]
    per_block_g = [power(g, n).as_dict() for n in sizes]

    def atoms(block_maps):
        out = {}
        for combo in itertools.product(*(m.items() for m in block_maps)):
            value = sum(w * k for w, (k, _) in zip(weights, combo))
            mass = math.prod(m for _, m in combo)
            out[round(value, 9)] = out.get(round(value, 9), 0.0) + mass
        return out

    fa, ga = atoms(per_block_f), atoms(per_block_g)
    grid = sorted(set(fa) | set(ga))
    cdf_f = np.cumsum([fa.get(x, 0.0) for x in grid])
    cdf_g = np.cumsum([ga.get(x, 0.0) for x in grid])
    return float(np.max(np.abs(cdf_f - cdf_g)))


class TestBasis:
    def test_rejects_nonpositive_weight(self):
        with pytest.raises(ValueError):
            WeightBasis((1.0, 0.0))

    def test_ratio(self):
        assert BASIS.ratio == pytest.approx(SQRT2, abs=1e-15)


class TestLift:
    def test_point_mass_position(self):
        m = lift(delta(1), 2, BASIS)
        assert m.masses.tolist() == [1.0]
        assert m.values()[0] == pytest.approx(SQRT2, abs=1e-15)

    def test_preserves_tv(self):
        assert lift(F, 1, BASIS).tv == tv_norm(F)
        assert lift(F - G, 2, BASIS).tv == tv_norm(F - G)

    def test_char_fn_scaling(self):
        # transform of the lift at t equals the lattice transform at w*t
        t = 1.0
        lifted = lift(F, 2, BASIS)
        direct = char_fn(F, SQRT2 * t, 0.0, 0)
        via_values = np.sum(lifted.masses * np.exp(1j * t * lifted.values()))
        assert abs(via_values - direct) <= 1e-12

    def test_index_out_of_range(self):
        with pytest.raises(IndexError):
            lift(F, 3, BASIS)


class TestWConvolve:
    def test_identity(self):
        a = lift(F, 1, BASIS)
        ident = lift(delta(0), 1, BASIS)
        out = wconvolve(a, ident)
        assert wkolmogorov_distance(out, a) == 0.0

    def test_mass_multiplies(self):
        a = lift(F, 1, BASIS)
        b = lift(G, 2, BASIS)
        assert wconvolve(a, b).total_mass == pytest.approx(
            a.total_mass * b.total_mass, abs=1e-12
        )

    def test_basis_mismatch(self):
        other = WeightBasis((1.0, 2.0))
        with pytest.raises(ValueError):
            wconvolve(lift(F, 1, BASIS), lift(G, 1, other))

    def test_lift_commutes_with_convolve(self):
        # convolve on the lattice then lift == lift both then wconvolve
        first = lift(power(F, 2), 2, BASIS)
        second = wconvolve(lift(F, 2, BASIS), lift(F, 2, BASIS))
        assert wkolmogorov_distance(first, second) <= 1e-12


class TestWeightedSum:
    def test_single_binomial(self):
        basis = WeightBasis((1.0,))
        out = weighted_sum_distribution([(from_entries({0: 0.5, 1: 0.5}), 2, 1)], basis)
        got = dict(zip(out.values().tolist(), out.masses.tolist()))
        assert got == {0.0: 0.25, 1.0: 0.5, 2.0: 0.25}

    def test_scaled_point(self):
        basis = WeightBasis((2.0,))
        out = weighted_sum_distribution([(delta(1), 3, 1)], basis)
        assert out.values()[0] == pytest.approx(6.0, abs=1e-15)
        assert out.masses[0] == 1.0

    def test_example_small_total_mass(self):
        out = weighted_sum_distribution([(F, 2, 1), (F, 2, 2)], BASIS)
        assert out.total_mass == pytest.approx(1.0, abs=1e-12)
        assert out.is_probability

    def test_rejects_signed_component(self):
        with pytest.raises(ValueError):
            weighted_sum_distribution([(delta(1) - delta(0), 1, 1)], BASIS)


class TestWKolmogorov:
    def test_self_distance(self):
        a = weighted_sum_distribution([(F, 2, 1), (F, 3, 2)], BASIS)
        assert wkolmogorov_distance(a, a) == 0.0

    def test_reduces_to_lattice_case(self):
        basis = WeightBasis((1.0,))
        a = lift(F, 1, basis)
        b = lift(G, 1, basis)
        assert wkolmogorov_distance(a, b) == pytest.approx(
            kolmogorov_norm(F - G), abs=1e-15
        )
        assert wkolmogorov_distance(a, b) == pytest.approx(0.175, abs=1e-15)

    def test_frozen_n4_regression(self):
        s_law = weighted_sum_distribution([(F, 2, 1), (F, 4, 2)], BASIS)
        z_law = weighted_sum_distribution([(G, 2, 1), (G, 4, 2)], BASIS)
        assert wkolmogorov_distance(s_law, z_law) == pytest.approx(
            N4_DISTANCE, abs=1e-13
        )

    def test_verify_frozen_constant(self):
        got = _enumeration_distance(F, G, (2, 4), (1.0, SQRT2))
        assert got == pytest.approx(N4_DISTANCE, abs=1e-11)

    def test_symmetry(self):
        a = weighted_sum_distribution([(F, 2, 1), (F, 2, 2)], BASIS)
        b = weighted_sum_distribution([(G, 2, 1), (G, 2, 2)], BASIS)
        assert wkolmogorov_distance(a, b) == wkolmogorov_distance(b, a)

    @given(st.integers(min_value=1, max_value=3), st.integers(min_value=1, max_value=3))
    @settings(max_examples=20, deadline=None)
    def test_triangle_inequality(self, n1, n2):
        h = from_entries({0: 0.6, 2: 0.4})
        a = weighted_sum_distribution([(F, n1, 1), (F, n2, 2)], BASIS)
        b = weighted_sum_distribution([(G, n1, 1), (G, n2, 2)], BASIS)
        c = weighted_sum_distribution([(h, n1, 1), (h, n2, 2)], BASIS)
        ab = wkolmogorov_distance(a, b)
        ac = wkolmogorov_distance(a, c)
        cb = wkolmogorov_distance(c, b)
        assert ab <= ac + cb + 1e-12

    def test_commensurable_weights_merge(self):
        # with weights (1, 2) the value grid collapses onto integers
        basis = WeightBasis((1.0, 2.0))
        a = wconvolve(lift(delta(2), 1, basis), lift(delta(0), 2, basis))
        b = wconvolve(lift(delta(0), 1, basis), lift(delta(1), 2, basis))
        assert wkolmogorov_distance(a, b) == 0.0


class TestWConcentration:
    def test_covers_everything(self):
        a = weighted_sum_distribution([(F, 1, 1), (F, 1, 2)], BASIS)
        diameter = float(a.values()[-1] - a.values()[0])
        assert wconcentration(a, diameter) == pytest.approx(1.0, abs=1e-12)

    def test_point_mass(self):
        a = lift(delta(3), 1, BASIS)
        assert wconcentration(a, 0.0) == 1.0

    def test_two_atoms_split(self):
        basis = WeightBasis((1.0, SQRT2))
        m = WeightedMeasure.from_entries(
            basis, [((0, 0), 0.5), ((0, 1), 0.5)]
        )
        assert wconcentration(m, 1.0) == pytest.approx(0.5, abs=1e-15)


class TestResourceGuard:
    def test_pair_blowup_raises(self):
        wide = from_entries({k: 1.0 / 4001 for k in range(4001)})
        a = lift(wide, 1, BASIS)
        b = lift(wide, 2, BASIS)
        with pytest.raises(ResourceLimitError):
            wconvolve(a, b)
