import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stopsearch import simulate, tanner
from stopsearch.simulate import brute_force_patterns, exact_curve, mc_run, peel_decode

from conftest import random_code

C1 = tanner.c1()


def is_stopping(H, S):
    S = set(S)
    return all(sum(i in S for i in row) != 1 for row in H.row_adj)


class TestPeeling:
    @given(st.integers(0, 10**6), st.integers(3, 9))
    def test_residual_is_largest_stopping_subset(self, seed, n):
        H = random_code(n, max(2, n // 2), seed)
        for y in range(1 << n):
            E = [i for i in range(n) if y >> i & 1]
            union = set()
            for r in range(1, len(E) + 1):
                for S in itertools.combinations(E, r):
                    if is_stopping(H, S):
                        union |= set(S)
            assert set(peel_decode(H, E)) == union

    def test_empty(self):
        assert peel_decode(C1, []) == ()


class TestMonteCarlo:
    def test_deterministic(self):
        a = mc_run(C1, 0.3, trials=5000, seed=4)
        b = mc_run(C1, 0.3, trials=5000, seed=4)
        assert a.to_json() == b.to_json()
        assert mc_run(C1, 0.3, trials=5000, seed=5).frame_errors != a.frame_errors

    def test_error_stop_matches_trial_stop(self):
        a = mc_run(C1, 0.2, errors=50, seed=1, block=1000)
        b = mc_run(C1, 0.2, trials=a.trials, seed=1, block=1000)
        assert a.frame_errors == b.frame_errors == 50
        assert a.bit_errors == b.bit_errors

    def test_block_size_changes_nothing_within_block(self):
        a = mc_run(C1, 0.3, trials=700, seed=2, block=1000)
        b = mc_run(C1, 0.3, trials=1000, seed=2, block=1000)
        assert a.frame_errors <= b.frame_errors

    def test_converges_to_exact(self):
        eps = 0.3
        r = mc_run(C1, eps, trials=200_000, seed=0)
        assert abs(r.fer - float(exact_curve(C1, "frame")(eps))) < 4 * r.fer_ci95
        assert abs(r.ber[1] - float(exact_curve(C1, 1)(eps))) < 4 * r.ber_ci95(1)

    def test_harvest_is_stopping_sets(self):
        r = mc_run(tanner.golay23(), 0.3, trials=3000, seed=0)
        assert r.harvested
        for S in r.harvested:
            assert is_stopping(tanner.golay23(), S)

    def test_punctured_always_erased(self):
        P = tanner.puncture(C1, [1, 2, 3])
        r = mc_run(P, 0.0, trials=10)
        assert r.frame_errors == 10

    def test_bad_args(self):
        with pytest.raises(ValueError):
            mc_run(C1, 0.3)
        with pytest.raises(ValueError):
            mc_run(C1, 1.3, trials=3)


class TestBruteForce:
    def test_c1(self):
        four = [(0, 1, 5), (0, 2, 4), (1, 2, 3), (3, 4, 5)]
        assert brute_force_patterns(C1, 4) == (3, four)
        assert brute_force_patterns(C1, 4, bit=0) == (3, [(0, 1, 5), (0, 2, 4)])
        assert brute_force_patterns(C1, 4, "codeword") == (3, four)
        assert brute_force_patterns(C1, 2) == (2, [])

    def test_golay(self):
        s, sets = brute_force_patterns(tanner.golay23(), 5)
        assert s == 4
        assert all(is_stopping(tanner.golay23(), S) for S in sets)

    def test_trapping(self):
        s, sets = brute_force_patterns(C1, 4, "trapping", k=1)
        for S in sets:
            assert tanner.classify_pattern(C1, S).degree_one_checks == 1

    def test_ceiling(self):
        with pytest.raises(ValueError):
            brute_force_patterns(tanner.tanner155(), 8, ceiling=1000)


class TestExactCurve:
    def test_probability_one_at_eps_one(self):
        assert exact_curve(C1, "frame")(1) == 1
        assert exact_curve(C1, 3)(Fraction(0)) == 0

    def test_direct_sum(self):
        H = random_code(8, 4, 11)
        eps = Fraction(2, 7)
        want = Fraction(0)
        for y in range(1 << 8):
            E = [i for i in range(8) if y >> i & 1]
            if 2 in peel_decode(H, E):
                want += eps ** len(E) * (1 - eps) ** (8 - len(E))
        assert exact_curve(H, 2)(eps) == want

    def test_shortened_bits_are_fixed(self):
        S = tanner.annotate_shortened(C1, [0])
        assert exact_curve(S, 0).order is None
