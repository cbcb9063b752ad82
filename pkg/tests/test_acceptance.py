"""Acceptance criteria 1-10.  Each test records one pass/fail line, printed at the end of the run."""

import random
import time
from fractions import Fraction

import pytest

from stopsearch import tanner
from stopsearch.exhaust import (SearchLimits, composite_sse, ktse, sse_bit, sse_frame, three_event_partition,
                                uniformly_good_check)
from stopsearch.simulate import brute_force_patterns, exact_curve

C1 = tanner.c1()

# 1-based, as printed for the quasi-cyclic (155,64) code
TANNER_REPS = [
    [7, 17, 19, 33, 66, 76, 128, 140],
    [7, 31, 33, 37, 44, 65, 100, 120],
    [1, 19, 63, 66, 105, 118, 121, 140],
    [44, 61, 65, 73, 87, 98, 137, 146],
    [31, 32, 37, 94, 100, 142, 147, 148],
]


def sweep_codes():
    for seed in range(50):
        n = 24 if seed % 2 == 0 else 30
        yield seed, tanner.regular(3, 6, n, seed)


def pair(size, sets):
    return (size, len(sets)) if sets else None


def test_c1_exact_curve(record):
    t0 = time.perf_counter()
    p = exact_curve(C1, 1)
    ok = p.coeffs == (0, 0, 0, 2, 2, -5, 2) and p(Fraction(1, 10)) == Fraction(2152, 10**6)
    dt = time.perf_counter() - t0
    record("1", ok and dt < 1, f"P(0.1) = {p(Fraction(1, 10))}, {dt:.3f}s")
    assert ok and dt < 1


def test_c1_exhaustion(record):
    t0 = time.perf_counter()
    r = sse_bit(C1, 1, SearchLimits(t=5))
    dt = time.perf_counter() - t0
    ok = (r.w_min == 3 and r.tight and r.exhaustive
          and sorted(map(tuple, r.x_min)) == [(0, 1, 5), (1, 2, 3)]
          and r.lb_curve.coeffs == (0, 0, 0, 2, 0, -1))
    record("2", ok and dt < 1, f"sets {r.x_min}, lb {r.lb_curve}, {dt:.3f}s")
    assert ok and dt < 1


def test_golay_frame(record):
    H = tanner.golay23()
    t0 = time.perf_counter()
    r = sse_frame(H, SearchLimits(t=4))
    t_search = time.perf_counter() - t0
    t0 = time.perf_counter()
    size, sets = brute_force_patterns(H, 4)
    t_oracle = time.perf_counter() - t0
    ok = r.w_min == 4 == size and len(r.x_min) == 130 and sorted(map(tuple, r.x_min)) == sets
    ok = ok and t_search < 30 and t_oracle < 5
    record("3", ok, f"{len(r.x_min)} sets, search {t_search:.1f}s, oracle {t_oracle:.2f}s")
    assert ok


def test_golay_per_bit(record):
    H = tanner.golay23()
    t0 = time.perf_counter()
    brute = [pair(*brute_force_patterns(H, 5, bit=b)) for b in range(H.n)]
    found = []
    for b in range(H.n):
        r = sse_bit(H, b, SearchLimits(t=5), bounds=False, split=10)
        assert r.exhaustive
        found.append(pair(r.w_min, r.x_min))
    dt = time.perf_counter() - t0
    ok = found == brute and {(4, 75), (4, 45), (4, 1)} <= set(brute) and dt < 60
    record("4", ok, f"pairs {sorted(set(brute))}, {dt:.1f}s")
    assert ok


def test_oracle_sweep(record):
    t0 = time.perf_counter()
    lim = SearchLimits(t=6)
    bad = []
    for seed, H in sweep_codes():
        r = sse_frame(H, lim)
        if (r.w_min, r.x_min) != brute_force_patterns(H, 6) or not r.exhaustive:
            bad.append((seed, "frame"))
        for b in random.Random(seed).sample(range(H.n), 3):
            r = sse_bit(H, b, lim, bounds=False)
            if (r.w_min, r.x_min) != brute_force_patterns(H, 6, bit=b) or not r.exhaustive:
                bad.append((seed, f"bit {b}"))
        for k in (1, 2):
            r = ktse(H, k, lim)
            if (r.w_min, r.x_min) != brute_force_patterns(H, 6, kind="trapping", k=k) or not r.exhaustive:
                bad.append((seed, f"k={k}"))
    dt = time.perf_counter() - t0
    record("5", not bad and dt < 600, f"{len(bad)} mismatches over 50 codes, {dt:.0f}s")
    assert not bad


def test_sandwich(record):
    t0 = time.perf_counter()
    grid = [Fraction(i, 20) for i in range(1, 11)]
    bad = []
    for seed in range(20):
        n = 12 if seed % 2 == 0 else 10
        H = tanner.regular(3, 6, n, seed) if seed % 2 == 0 else tanner.regular(2, 4, n, seed)
        for scope in ("frame", 0, n // 2):
            exact = exact_curve(H, scope)
            if scope == "frame":
                r = sse_frame(H, SearchLimits(t=n), bounds=True, eps_grid=grid)
            else:
                r = sse_bit(H, scope, SearchLimits(t=n), eps_grid=grid)
            ubs = dict(r.ub_points)
            order = r.ub_curve.order
            for e in grid:
                lb = r.lb_curve(e) if r.lb_curve is not None else 0
                if not lb <= exact(e) <= ubs[e]:
                    bad.append((seed, scope, e))
            if r.x_min and order != r.w_min:
                bad.append((seed, scope, "order"))
    dt = time.perf_counter() - t0
    record("6", not bad and dt < 300, f"{len(bad)} violations, {dt:.1f}s")
    assert not bad


def test_invariant_suite(record):
    import test_booltree as tb
    import test_simulate as ts
    t0 = time.perf_counter()
    checks = [
        tb.TestGrowth().test_monotone,
        tb.TestGrowth().test_dominates_and_narrows,
        tb.TestWeights().test_cut_keeps_light_patterns,
        tb.TestPivot().test_pivot_preserves_function,
        tb.TestPivot().test_pivots_actually_happen,
        tb.TestCorrelation().test_nonnegative_correlation,
        ts.TestPeeling().test_residual_is_largest_stopping_subset,
    ]
    failed = []
    for f in checks:
        try:
            f()
        except AssertionError:
            failed.append(f.__name__)
    dt = time.perf_counter() - t0
    record("7", not failed and dt < 600, f"{len(checks)} property groups, failed {failed}, {dt:.1f}s")
    assert not failed


def test_composite(record):
    t0 = time.perf_counter()
    lim = SearchLimits(t=6)
    bad = []
    for seed, H in sweep_codes():
        n = H.n
        for scope in ("frame", 0):
            base = sse_frame(H, lim) if scope == "frame" else sse_bit(H, 0, lim, bounds=False)
            for part in (three_event_partition(10, 47 % n), None):
                r = composite_sse(H, scope, part, lim, bounds=False)
                if (r.w_min, r.x_min) != (base.w_min, base.x_min):
                    bad.append((seed, scope, part is None))
    grid = [0.05 * i for i in range(1, 11)]
    for seed in range(10):
        H = tanner.regular(3, 6, 12, seed)
        for scope in ("frame", 0):
            exact = exact_curve(H, scope)
            for part in (three_event_partition(10, 47 % 12), None):
                r = composite_sse(H, scope, part, SearchLimits(t=12), eps_grid=grid)
                if not all(v >= float(exact(e)) - 1e-12 for e, v in r.ub_points):
                    bad.append((seed, scope, "ub"))
    dt = time.perf_counter() - t0
    record("8", not bad and dt < 300, f"{len(bad)} mismatches, {dt:.0f}s")
    assert not bad


def test_tanner_representatives(record):
    t0 = time.perf_counter()
    H = tanner.tanner155()
    kinds = [tanner.classify_pattern(H, [i - 1 for i in S]) for S in TANNER_REPS]
    ok = all(pc.size == 8 and pc.degree_one_checks == 2 for pc in kinds)
    dt = time.perf_counter() - t0
    record("9 (representatives)", ok and dt < 1, f"{[pc.label() for pc in kinds]}, {dt:.3f}s")
    assert ok and dt < 1


@pytest.mark.slow
def test_tanner_full_enumeration(record):
    H = tanner.tanner155()
    t0 = time.perf_counter()
    r = ktse(H, 2, SearchLimits(t=8), symmetry=[tanner.block_shift(155, 31)])
    dt = time.perf_counter() - t0
    found = set(r.x_min)
    reps = all(tuple(i - 1 for i in S) in found for S in TANNER_REPS)
    ok = r.exhaustive and r.w_min == 8 and len(r.x_min) == 465 and reps
    record("9 (full)", ok, f"w_min {r.w_min}, {len(r.x_min)} sets, representatives found {reps}, {dt:.0f}s")
    assert ok


def test_uniformly_good_cross_check(record):
    t0 = time.perf_counter()
    bad = []
    for seed in range(22, 32):
        H = tanner.regular(3, 6, 24, seed)
        v = uniformly_good_check(H, 3, 1)
        assert v.verdict
        r = ktse(H, 1, SearchLimits(t=2))
        if r.x_min or not r.exhaustive or brute_force_patterns(H, 2, kind="trapping", k=1)[1]:
            bad.append(seed)
    dt = time.perf_counter() - t0
    record("10", not bad and dt < 300, f"10 codes with d = 3, {len(bad)} counterexamples, {dt:.1f}s")
    assert not bad
