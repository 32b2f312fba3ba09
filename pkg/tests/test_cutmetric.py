"""Cut norm and cut distance, validated against full enumeration."""

import itertools
import random
from fractions import Fraction

import numpy as np
import pytest

from flagsos import (
    SmallGraph,
    blowup,
    BlowupSpec,
    canonical_form,
    complete_bipartite,
    cut_norm,
    cut_norm_witness,
    cycle,
    d_box,
    delta_blowup_sequence,
    delta_hat,
    empty_graph,
    path,
    relabel,
)
from flagsos.cutmetric import CUT_NORM_MAX, DELTA_HAT_MAX, adjacency_matrix

import oracles


def random_rational_matrix(n, rng, lo=-3, hi=4, den=4):
    return [
        [Fraction(rng.randrange(lo, hi), rng.randrange(1, den)) for _ in range(n)]
        for _ in range(n)
    ]


def full_int_cut_norm(A) -> Fraction:
    """Exact cut norm of an integer matrix by enumerating all 4^n rectangles."""
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[0]
    picks = np.array(
        [[(m >> i) & 1 for i in range(n)] for m in range(1 << n)], dtype=np.int64
    )
    sums = picks @ A @ picks.T
    return Fraction(int(np.abs(sums).max()), n * n)


class TestCutNorm:
    def test_all_ones(self):
        for n in (1, 3, 6):
            assert cut_norm([[1] * n for _ in range(n)]) == 1

    def test_single_entry(self):
        for n in (2, 4, 7):
            m = [[0] * n for _ in range(n)]
            m[1][0] = 1
            assert cut_norm(m) == Fraction(1, n * n)

    def test_sign_invariance(self):
        rng = random.Random(83)
        for _ in range(10):
            m = random_rational_matrix(4, rng)
            neg = [[-x for x in row] for row in m]
            assert cut_norm(m) == cut_norm(neg)

    def test_witness_achieves_value(self):
        rng = random.Random(89)
        for _ in range(25):
            n = rng.randrange(1, 8)
            m = random_rational_matrix(n, rng)
            value, smask, tmask = cut_norm_witness(m)
            total = sum(
                m[i][j]
                for i in range(n)
                for j in range(n)
                if smask >> i & 1 and tmask >> j & 1
            )
            assert abs(total) == value * n * n

    def test_matches_full_enumeration_rationals(self):
        rng = random.Random(97)
        for _ in range(30):
            n = rng.randrange(1, 7)
            m = random_rational_matrix(n, rng)
            assert cut_norm(m) == oracles.cut_norm_full(m)

    @pytest.mark.parametrize("n", [8, 10, 12])
    def test_matches_full_enumeration_larger(self, n):
        rng = random.Random(100 + n)
        for _ in range(4):
            m = [[rng.randrange(-5, 6) for _ in range(n)] for _ in range(n)]
            assert cut_norm(m) == full_int_cut_norm(m)

    def test_size_cap(self):
        big = [[0] * (CUT_NORM_MAX + 1) for _ in range(CUT_NORM_MAX + 1)]
        with pytest.raises(ValueError, match="supports n <="):
            cut_norm(big)

    def test_rejects_non_square(self):
        with pytest.raises(ValueError, match="square"):
            cut_norm([[1, 2]])


class TestDBox:
    def test_identity(self):
        assert d_box(cycle(5), cycle(5)) == 0

    def test_labeled_sensitivity(self):
        g = cycle(5)
        h = relabel(g, [2, 0, 4, 1, 3])
        assert d_box(g, h) > 0
        assert delta_hat(g, h) == 0

    def test_known_value(self):
        assert d_box(cycle(5), path(5)) == Fraction(2, 25)

    def test_symmetry_and_triangle_inequality(self):
        rng = random.Random(101)
        for _ in range(12):
            n = rng.randrange(2, 8)
            a = oracles.random_tf_graph(n, rng)
            b = oracles.random_tf_graph(n, rng)
            c = oracles.random_tf_graph(n, rng)
            assert d_box(a, b) == d_box(b, a)
            assert d_box(a, c) <= d_box(a, b) + d_box(b, c)

    def test_size_mismatch(self):
        with pytest.raises(ValueError, match="different sizes"):
            d_box(cycle(5), cycle(6))


class TestDeltaHat:
    def test_isomorphic_pairs_at_zero(self):
        rng = random.Random(103)
        for _ in range(10):
            n = rng.randrange(1, 8)
            g = oracles.random_tf_graph(n, rng)
            h = relabel(g, rng.sample(range(n), n))
            assert delta_hat(g, h) == 0

    def test_is_min_over_relabelings(self):
        rng = random.Random(107)
        for _ in range(6):
            n = rng.randrange(2, 6)
            g = oracles.random_tf_graph(n, rng)
            h = oracles.random_tf_graph(n, rng)
            best = min(
                d_box(relabel(g, list(p)), h)
                for p in itertools.permutations(range(n))
            )
            assert delta_hat(g, h) == best

    def test_known_value(self):
        assert delta_hat(cycle(5), path(5)) == Fraction(2, 25)

    def test_positive_for_non_isomorphic(self):
        assert delta_hat(cycle(6), complete_bipartite(3, 3)) > 0

    def test_caps_and_mismatch(self):
        with pytest.raises(ValueError, match="supports n <="):
            delta_hat(empty_graph(DELTA_HAT_MAX + 1), empty_graph(DELTA_HAT_MAX + 1))
        with pytest.raises(ValueError, match="different sizes"):
            delta_hat(cycle(5), cycle(4))


class TestBlowupSequence:
    def test_matched_blowups_stay_at_zero(self):
        k2 = SmallGraph(2, [(0, 1)])
        seq = delta_blowup_sequence(k2, k2, 2)
        assert seq == [Fraction(0), Fraction(0)]

    def test_cross_blowup_scales(self):
        k1 = SmallGraph(1)
        k2 = SmallGraph(2, [(0, 1)])
        seq = delta_blowup_sequence(k1, k2, 4)
        assert seq == [Fraction(1, 2)] * 4
        # entry k compares the two graphs blown up to a common size
        direct = delta_hat(
            blowup(BlowupSpec(k1, (4,))),
            blowup(BlowupSpec(k2, (2, 2))),
        )
        assert seq[1] == direct

    def test_regime_guard(self):
        with pytest.raises(ValueError, match="delta_hat regime"):
            delta_blowup_sequence(SmallGraph(1), SmallGraph(2, [(0, 1)]), 5)
        with pytest.raises(ValueError, match="nonempty"):
            delta_blowup_sequence(SmallGraph(0), SmallGraph(1), 1)


class TestAdjacencyMatrix:
    def test_entries(self):
        m = adjacency_matrix(path(3))
        assert m == [[0, 1, 0], [1, 0, 1], [0, 1, 0]]
        assert adjacency_matrix(empty_graph(2)) == [[0, 0], [0, 0]]

    def test_cut_norm_of_adjacency(self):
        # edge density bound: the whole matrix is one rectangle
        g = complete_bipartite(2, 2)
        assert cut_norm(adjacency_matrix(g)) == Fraction(8, 16)
