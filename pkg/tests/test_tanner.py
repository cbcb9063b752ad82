import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from stopsearch import tanner
from stopsearch.tanner import (AlistError, SparseParityCheck, classify_pattern, merge_columns,
                               parse_alist, puncture, shorten, write_alist)

from conftest import random_code

C1 = tanner.c1()


def gf2_rank(M: np.ndarray) -> int:
    M = M.copy() % 2
    r = 0
    for c in range(M.shape[1]):
        piv = np.flatnonzero(M[r:, c])
        if not len(piv):
            continue
        p = r + piv[0]
        M[[r, p]] = M[[p, r]]
        for i in np.flatnonzero(M[:, c]):
            if i != r:
                M[i] ^= M[r]
        r += 1
        if r == M.shape[0]:
            break
    return r


class TestClassify:
    # 0-based: v2,v3,v4 -> 1,2,3
    def test_c1_examples(self):
        assert classify_pattern(C1, [0, 1, 5]).kind == "codeword_support"
        assert classify_pattern(C1, [0, 1, 2, 3]).label() == "k_out_trapping(1)"
        assert classify_pattern(C1, [0, 1, 3, 4]).is_stopping_set
        assert classify_pattern(C1, []).kind == "empty"

    def test_codeword_support_is_also_stopping(self):
        pc = classify_pattern(C1, [1, 2, 3])
        assert pc.kind == "codeword_support"
        assert pc.memberships() == ["codeword_support", "stopping_set"]

    def test_rejects_bad_index(self):
        with pytest.raises((IndexError, ValueError)):
            classify_pattern(C1, [6])

    @given(st.lists(st.integers(0, 5), max_size=6), st.randoms())
    def test_order_invariant(self, S, rnd):
        T = list(S)
        rnd.shuffle(T)
        assert classify_pattern(C1, S) == classify_pattern(C1, T)

    def test_codeword_supports_are_stopping_sets(self):
        H = tanner.golay23()
        for S in itertools.combinations(range(10), 4):
            pc = classify_pattern(H, S)
            if pc.kind == "codeword_support":
                assert pc.degree_one_checks == 0

    def test_agrees_with_dense_syndrome(self):
        D = C1.to_dense()
        for r in range(1, 7):
            for S in itertools.combinations(range(6), r):
                x = np.zeros(6, dtype=int)
                x[list(S)] = 1
                deg = D @ x
                pc = classify_pattern(C1, S)
                assert pc.degree_one_checks == int((deg == 1).sum())
                assert pc.odd_degree_checks == int((deg % 2 == 1).sum())


class TestConditioning:
    def test_shorten_keeps_labels(self):
        H = shorten(C1, [0, 3])
        assert H.n == 4 and H.labels == (1, 2, 4, 5)
        assert H.m == C1.m

    @given(st.integers(0, 40), st.sets(st.integers(0, 7), max_size=3))
    def test_shortened_stopping_sets(self, seed, S):
        # T is a stopping set of the shortened code iff it induces no degree-1 check there
        H = random_code(8, 5, seed)
        Hs = shorten(H, S)
        back = {lab: i for i, lab in enumerate(H.labels)}
        for r in range(1, 4):
            for T in itertools.combinations(range(Hs.n), r):
                orig = [back[Hs.labels[i]] for i in T]
                deg = {}
                for i in orig:
                    for j in H.col_adj[i]:
                        deg[j] = deg.get(j, 0) + 1
                assert classify_pattern(Hs, T).is_stopping_set == (1 not in deg.values())

    def test_puncture_shorten_conflict(self):
        H = tanner.annotate_shortened(C1, [2])
        with pytest.raises(ValueError):
            puncture(H, [2])

    def test_merge_columns(self):
        H = tanner.golay23()
        G, star = merge_columns(H, [0, 1])
        assert star == G.n - 1 and star in G.punctured and G.labels[star] == tanner.MERGED_LABEL
        # stopping sets of H containing {0,1} correspond to those of G containing star
        pos = {lab: i for i, lab in enumerate(G.labels)}
        for extra in itertools.combinations(range(2, 23), 2):
            S = (0, 1) + extra
            T = [pos[i] for i in extra] + [star]
            assert classify_pattern(H, S).is_stopping_set == classify_pattern(G, T).is_stopping_set


class TestAlist:
    def test_round_trip_builtins(self):
        for H in (C1, tanner.golay23(), tanner.tanner155()):
            assert parse_alist(write_alist(H)) == H

    @given(st.integers(0, 500))
    def test_round_trip_random(self, seed):
        H = random_code(9, 5, seed)
        assert parse_alist(write_alist(H)) == H

    @pytest.mark.parametrize("text, line", [
        ("3 2\n2 3\n1 1 1\n1 2\n1 0\n1 0\n2 0\n1 0 0\n2 3 0\n", 6),  # row/column mismatch
        ("3 2\n2 3\n1 1 1\n1 2\n1 0\n1 0\n1 0\n1 0 0\n3 3 0\n", 9),  # duplicate edge
        ("3 2\n2 3\n1 1 1\n", 3),  # truncated
        ("3 2\n2 3\n1 x 1\n1 2\n", 3),  # bad token
        ("3 2\n2 3\n1 1 1\n1 2\n1 0\n1 0\n4 0\n1 0 0\n2 3 0\n", 7),  # out of range
    ])
    def test_errors_carry_line(self, text, line):
        with pytest.raises(AlistError) as ei:
            parse_alist(text)
        assert ei.value.line == line

    def test_one_based_text(self):
        H = parse_alist("3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 2\n2 3\n")
        assert H.row_adj == ((0, 1), (1, 2))


class TestBuiltins:
    def test_golay_shape_and_checksum(self):
        H = tanner.golay23()
        assert (H.n, H.m) == (23, 11)
        assert gf2_rank(H.to_dense()) == 11
        assert H.checksum() == "417a037f2571db4e59b131e5e6f402061a23ecea3bbd4f8a6f82fed4c2bc52ed"

    def test_c1_checksum(self):
        assert C1.row_adj == ((0, 1, 2), (1, 3, 5), (2, 3, 4), (0, 4, 5))
        assert C1.checksum() == "e2cfbda0cf80637e69caceda21e81773072e549682bb3a62a8ad1bfcab326685"

    def test_tanner_code(self):
        H = tanner.tanner155()
        assert (H.n, H.m) == (155, 93)
        assert {len(r) for r in H.row_adj} == {5} and {len(c) for c in H.col_adj} == {3}
        assert H.n - gf2_rank(H.to_dense()) == 64
        assert H.checksum() == "a738903acad75d3acc1b3850671edab955effe7e69a7f948713045df3679eaee"
        assert tanner.tanner155(right_shift=True) != H

    def test_regular_is_seeded(self):
        a, b = tanner.regular(3, 6, 24, 7), tanner.regular(3, 6, 24, 7)
        assert a == b and a.checksum() == b.checksum()
        assert a != tanner.regular(3, 6, 24, 8)
        assert {len(r) for r in a.row_adj} == {6} and {len(c) for c in a.col_adj} == {3}

    def test_regular_no_parallel_edges(self):
        for seed in range(20):
            H = tanner.regular(3, 6, 30, seed)
            for r in H.row_adj:
                assert len(set(r)) == len(r)

    def test_irregular_profile(self):
        H = tanner.irregular([0, 0.5, 0.5], [0, 0, 0, 0, 0, 1], 30, 1)
        degs = sorted(len(c) for c in H.col_adj)
        assert set(degs) <= {2, 3} and {len(r) for r in H.row_adj} == {6}

    def test_builtin_code_errors(self):
        with pytest.raises(ValueError):
            tanner.builtin_code("nope")
        with pytest.raises(ValueError):
            tanner.builtin_code("regular", (3, 6, 24))


class TestAutomorphisms:
    def test_tanner_block_shift(self):
        H = tanner.tanner155()
        cp = tanner.check_permutation(H, tanner.block_shift(155, 31))
        assert sorted(cp) == list(range(93))

    def test_rejects_non_automorphism(self):
        with pytest.raises(ValueError):
            tanner.check_permutation(tanner.golay23(), tanner.block_shift(23, 23))
        with pytest.raises(ValueError):
            tanner.check_permutation(C1, [0, 0, 1, 2, 3, 4])
        with pytest.raises(ValueError):
            tanner.block_shift(10, 3)


class TestStructure:
    def test_invalid_construction(self):
        with pytest.raises((ValueError, IndexError)):
            SparseParityCheck.from_rows([[0, 7]], 3)

    def test_dense_round_trip(self):
        assert SparseParityCheck.from_dense(C1.to_dense()) == C1
