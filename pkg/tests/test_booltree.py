"""Invariants of the decoding tree, checked exhaustively over all erasure patterns of small codes."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from stopsearch import booltree, simulate, tanner
from stopsearch.booltree import (ACTIVE, CHK, VAR, BudgetExceeded, DecodingTree, InvariantViolation,
                                 init_frame_tree, init_tree)
from stopsearch.bounds import min_weight_terms, ub_eval
from stopsearch.exhaust import LeafFinder

from conftest import random_code


def patterns(n: int) -> np.ndarray:
    x = np.arange(1 << n)
    return ((x[:, None] >> np.arange(n)) & 1).astype(bool)


def truth(H, Y, root=None) -> np.ndarray:
    Y = Y.copy()
    for i in H.punctured:
        Y[:, i] = True
    R = simulate.peel_batch(H, Y.astype(np.uint8)).astype(bool)
    return R.any(axis=1) if root is None else R[:, root]


def grow(tree, steps, policy="random", seed=0, check=True, hook=None):
    lf = LeafFinder(policy, seed)
    for _ in range(steps):
        pos = lf.next(tree)
        if pos is None:
            break
        tree.grow_leaf(*pos)
        if check:
            tree.check_invariants()
        if hook:
            hook(tree)
    return tree


class Recorder(DecodingTree):
    """Tree that checks function equality around every pivot."""

    Y = None
    events = 0

    def pivot(self, v, k):
        before = self.eval_batch(self.Y)
        super().pivot(v, k)
        assert np.array_equal(before, self.eval_batch(self.Y)), "pivot changed the function"
        Recorder.events += 1


def recorder_tree(H, root):
    T = init_tree(H, root)
    T.__class__ = Recorder
    T.Y = patterns(H.n)
    return T


codes = st.builds(lambda n, m, s: random_code(n, m, s), st.integers(5, 10), st.integers(3, 6),
                  st.integers(0, 10**6))


class TestGrowth:
    @given(codes, st.integers(0, 9), st.integers(0, 99))
    def test_dominates_and_narrows(self, H, root, seed):
        root %= H.n
        Y = patterns(H.n)
        f = truth(H, Y, root)
        T = init_tree(H, root)
        prev = T.eval_batch(Y)
        assert (prev >= f).all()
        lf = LeafFinder("random", seed)
        for _ in range(60):
            pos = lf.next(T)
            if pos is None:
                break
            T.grow_leaf(*pos)
            T.check_invariants()
            cur = T.eval_batch(Y)
            assert (cur >= f).all(), "tree lost a failure pattern"
            assert (cur <= prev).all(), "growth widened the function"
            prev = cur

    @given(codes, st.integers(0, 9), st.integers(0, 99))
    def test_monotone(self, H, root, seed):
        root %= H.n
        T = grow(init_tree(H, root), 25, seed=seed, check=False)
        Y = patterns(H.n)
        f = T.eval_batch(Y)
        idx = np.arange(len(Y))
        for i in range(H.n):
            up = idx | (1 << i)
            assert (f[idx] <= f[up]).all()

    @given(codes, st.integers(0, 9), st.integers(0, 99))
    def test_fully_grown_tree_is_exact(self, H, root, seed):
        root %= H.n
        try:
            T = grow(init_tree(H, root, budget=2000), 10**6, seed=seed, check=False)
        except BudgetExceeded:
            assume(False)
        Y = patterns(H.n)
        assert np.array_equal(T.eval_batch(Y), truth(H, Y, root))

    def test_frame_tree(self):
        done = 0
        for seed in range(30):
            H = random_code(8, 4, seed, 0.25)
            Y = patterns(H.n)
            try:
                T = grow(init_frame_tree(H, budget=5000), 10**6, policy="balanced", check=False)
            except BudgetExceeded:
                continue
            done += 1
            assert np.array_equal(T.eval_batch(Y), truth(H, Y))
        assert done >= 10


class TestPivot:
    @settings(max_examples=25)
    @given(codes, st.integers(0, 9), st.integers(0, 99))
    def test_pivot_preserves_function(self, H, root, seed):
        root %= H.n
        grow(recorder_tree(H, root), 80, seed=seed)

    def test_pivots_actually_happen(self):
        Recorder.events = 0
        for seed in range(15):
            grow(recorder_tree(random_code(9, 5, seed, 0.45), 0), 80, seed=seed)
        assert Recorder.events > 20

    def test_outcomes_on_c1(self):
        T = init_tree(tanner.c1(), 1)
        seen = set()
        lf = LeafFinder("balanced")
        for _ in range(300):
            seen.add(T.grow_leaf(*lf.next(T)))
            T.check_invariants()
        assert seen == {"plain_add", "pivoted", "rule4_add"}

    def test_pivot_requires_variable_site(self):
        T = init_tree(tanner.c1(), 1)
        with pytest.raises(InvariantViolation):
            T.pivot(T.children[T.root][0], 0)


class TestWeights:
    @given(codes, st.integers(0, 9), st.integers(0, 99))
    def test_weight_is_lightest_pattern(self, H, root, seed):
        root %= H.n
        T = grow(init_tree(H, root), 30, seed=seed, check=False)
        Y = patterns(H.n)
        f = T.eval_batch(Y)
        sizes = Y.sum(axis=1)
        if not f.any():
            assert T.weight >= booltree.INF
            return
        w = int(sizes[f].min())
        assert T.weight == w
        cands = min_weight_terms(T)
        want = sorted(tuple(np.flatnonzero(y)) for y in Y[f & (sizes == w)])
        assert cands.complete and sorted(cands.sets) == want

    @given(codes, st.integers(0, 9), st.integers(0, 99), st.integers(1, 4))
    def test_cut_keeps_light_patterns(self, H, root, seed, cut):
        root %= H.n
        Y = patterns(H.n)
        light = Y.sum(axis=1) <= cut
        f = truth(H, Y, root)
        T = init_tree(H, root)
        T.cut = cut
        prev = T.eval_batch(Y)

        def hook(tree):
            nonlocal prev
            cur = tree.eval_batch(Y) if tree.alive[tree.root] else np.zeros(len(Y), bool)
            assert (cur[light] >= f[light]).all()
            assert (cur <= prev).all()
            prev = cur
        grow(T, 60, seed=seed, hook=hook)


class TestCorrelation:
    def test_nonnegative_correlation(self):
        # monotone functions of independent erasures are nonnegatively correlated
        eps = Fraction(1, 3)
        pairs = 0
        for seed in range(100):
            H = random_code(7, 4, seed, 0.4)
            Y = patterns(H.n)
            w = Y.sum(axis=1)
            p = np.array([eps ** int(k) * (1 - eps) ** (H.n - int(k)) for k in w], dtype=object)
            rng = np.random.default_rng(seed)
            for _ in range(2):
                a, b = rng.integers(H.n, size=2)
                f = grow(init_tree(H, int(a)), int(rng.integers(0, 15)), seed=seed, check=False).eval_batch(Y)
                g = grow(init_tree(H, int(b)), int(rng.integers(0, 15)), seed=seed + 1, check=False).eval_batch(Y)
                ef, eg, efg = p[f].sum(), p[g].sum(), p[f & g].sum()
                assert efg - ef * eg >= 0
                pairs += 1
        assert pairs == 200


class TestFinalize:
    @given(codes, st.integers(0, 9), st.integers(0, 99))
    def test_finalize_keeps_function_and_bounds(self, H, root, seed):
        root %= H.n
        T = grow(init_tree(H, root), 20, seed=seed, check=False)
        Y = patterns(H.n)
        before = T.eval_batch(Y)
        T.finalize()
        assert np.array_equal(before, T.eval_batch(Y))
        assert not any(T.pending[x] for x in T.live_nodes() if T.kind[x] == CHK)
        exact = simulate.exact_curve(H, root)
        for e in (Fraction(1, 20), Fraction(1, 5), Fraction(1, 2)):
            assert ub_eval(T, e) >= exact(e)
        with pytest.raises(InvariantViolation):
            T.grow_leaf(T.root, 0)


class TestMisc:
    def test_budget_is_checked_before_mutation(self):
        T = init_tree(tanner.golay23(), 0, budget=40)
        lf = LeafFinder("balanced")
        with pytest.raises(BudgetExceeded):
            while (pos := lf.next(T)) is not None:
                size = T.size
                snapshot = T.dump()
                try:
                    T.grow_leaf(*pos)
                except BudgetExceeded:
                    assert T.size == size and T.dump() == snapshot
                    raise
        T.check_invariants()

    def test_shortened_and_punctured_roots(self):
        H = tanner.annotate_shortened(tanner.c1(), [1])
        assert init_tree(H, 1).weight >= booltree.INF
        P = tanner.puncture(tanner.c1(), [1])
        T = init_tree(P, 1)
        assert T.status[T.root] != ACTIVE

    def test_golden_dump(self):
        T = init_tree(tanner.c1(), 1)
        assert T.dump() == "(v1:active (c0?0,2) (c1?3,5))"
        grow(T, 3, policy="balanced")
        assert T.dump() == GOLDEN_C1

    def test_balanced_order(self):
        # logical depth never decreases and copies of one logical position come out together
        H = random_code(9, 5, 3, 0.45)
        T = init_tree(H, 0)
        lf = LeafFinder("balanced")
        keys = []
        while (pos := lf.next(T)) is not None and len(keys) < 300:
            c, u = pos
            keys.append((T.ldepth[T.lid[c]], T.lid[c], T.tan[c], u))
            T.grow_leaf(c, u)
        depths = [k[0] for k in keys]
        assert depths == sorted(depths)
        seen, last = set(), None
        for k in keys:
            if k != last:
                assert k not in seen
                seen.add(k)
            last = k


GOLDEN_C1 = "(v1:active (c0 (v0:active (c3?4,5)) (v2:active (c2?3,4))) (c1?5 (v3:active (c2?2,4))))"
