"""Search drivers: bit-wise and frame-wise stopping-set exhaustion,
conditioning on partitions, and k-out trapping-set exhaustion.

Every driver works up to a size limit ``t``.  A bit-wise search grows a
:class:`~stopsearch.booltree.DecodingTree` and stops as soon as one of
these holds:

* the tree's minimum witness weight exceeds ``t``: no failure pattern of
  size <= t contains the bit;
* a minimum-weight witness is a real failure pattern: all of them are then
  real and they are exactly the minimal stopping sets through the bit;
* the minimum weight reaches ``t`` and no minimum-weight witness is real:
  again nothing of size <= t exists;
* the node or time budget runs out: the report is partial.

Pending leaves whose cheapest completion already costs more than ``t`` are
never expanded; they cannot influence sets of size <= t.
"""

from __future__ import annotations

import heapq
import itertools
import time
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .booltree import (INF, BudgetExceeded, DecodingTree, InvariantViolation, init_frame_tree,
                       init_tree)
from .bounds import ErasurePolynomial, lower_bound_poly, min_weight_terms, ub_eval, ub_poly
from .simulate import peel_decode
from .tanner import (MERGED_LABEL, SparseParityCheck, check_degrees, check_permutation, classify_pattern,
                     puncture, shorten)


@dataclass(frozen=True)
class SearchLimits:
    t: int = 8
    node_budget: int = 2_000_000
    count_cap: int = 100_000
    time_budget: float | None = None

    def __post_init__(self):
        if self.t < 0 or self.node_budget < 1 or self.count_cap < 1:
            raise ValueError("limits must be positive")
        if self.time_budget is not None and self.time_budget <= 0:
            raise ValueError("time budget must be positive")

    def with_t(self, t: int) -> "SearchLimits":
        return SearchLimits(t, self.node_budget, self.count_cap, self.time_budget)

    def to_json(self) -> dict:
        return {"t": self.t, "node_budget": self.node_budget, "count_cap": self.count_cap,
                "time_budget": self.time_budget}


@dataclass
class SearchReport:
    scope: str
    w_min: int
    x_min: list
    exhaustive: bool
    tight: bool = False
    proven_absent_up_to: int | None = None
    classification: list = field(default_factory=list)
    ub_curve: ErasurePolynomial | None = None
    lb_curve: ErasurePolynomial | None = None
    ub_points: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "scope": self.scope,
            "w_min": self.w_min,
            "exhaustive": self.exhaustive,
            "tight": self.tight,
            "proven_absent_up_to": self.proven_absent_up_to,
            "count": len(self.x_min),
            "sets": [list(s) for s in self.x_min],
            "classification": [c.to_json() for c in self.classification],
            "ub_curve": self.ub_curve.to_json() if self.ub_curve is not None else None,
            "ub_truncation": self.ub_curve.truncation_degree if self.ub_curve is not None else None,
            "lb_curve": self.lb_curve.to_json() if self.lb_curve is not None else None,
            "ub_points": [[float(e), float(v)] for e, v in self.ub_points],
            "stats": self.stats,
        }


@dataclass(frozen=True)
class PartitionEvent:
    forced_one: frozenset
    forced_zero: frozenset

    def __post_init__(self):
        object.__setattr__(self, "forced_one", frozenset(self.forced_one))
        object.__setattr__(self, "forced_zero", frozenset(self.forced_zero))
        if self.forced_one & self.forced_zero:
            raise ValueError("an event cannot force a bit both ways")

    @property
    def probability_factor(self) -> ErasurePolynomial:
        return ErasurePolynomial.event_factor(len(self.forced_one), len(self.forced_zero))


# ---------------------------------------------------------------------------
# leaf finding

class LeafFinder:
    """Chooses which pending position to expand next.

    ``balanced`` (default) serves positions in breadth-first order of the
    unpivoted tree: positions are keyed by the logical depth and identity
    (parent, check, candidate) of the variable they would create, so all
    physical copies of one logical leaf made by pivoting are served back to
    back.  ``bfs`` orders by physical depth; ``random`` draws positions
    uniformly from a seeded generator.  ``lightest`` puts the through-weight
    of a position ahead of the balanced key: only positions on minimum-weight
    witnesses can raise the tree's weight, so exhaustion reaches a verdict
    with far fewer expansions.  The drivers use it.

    The heap holds checks, each keyed by its first pending candidate, and a
    check is re-queued after each of its positions is served.
    """

    def __init__(self, policy: str = "balanced", seed: int = 0):
        if policy not in ("balanced", "lightest", "bfs", "random"):
            raise ValueError(f"unknown leaf-finding policy {policy!r}")
        self.policy = policy
        self.heap: list = []
        self.pool: list = []
        self.parked: list = []
        self.seq = 0
        self.last = -1
        self.rng = np.random.default_rng(seed)

    def _drain(self, tree: DecodingTree) -> None:
        for c in tree.fresh:
            if tree.alive[c] and tree.pending[c]:
                self._push(tree, c)
        tree.fresh.clear()
        if self.last >= 0:
            c, self.last = self.last, -1
            if tree.alive[c] and tree.pending[c]:
                self._push(tree, c)

    def _push(self, tree, c):
        if self.policy == "random":
            self.pool.extend((c, u) for u in tree.pending[c])
            return
        self.seq += 1
        if self.policy == "bfs":
            item = (0, tree.depth[c], 0, 0, 0, self.seq, c)
        else:
            lp = tree.lid[c]
            th = tree.through(c) if self.policy == "lightest" else 0
            item = (th, tree.ldepth[lp] + 1, lp, tree.tan[c], tree.pending[c][0], self.seq, c)
        heapq.heappush(self.heap, item)

    def next(self, tree: DecodingTree, keep: Callable[[int], bool] | None = None):
        self._drain(tree)
        if self.policy == "random":
            while self.pool:
                i = int(self.rng.integers(len(self.pool)))
                self.pool[i], self.pool[-1] = self.pool[-1], self.pool[i]
                c, u = self.pool.pop()
                if not tree.alive[c] or u not in tree.pending[c]:
                    continue
                if keep is not None and not keep(c):
                    self.parked.append(c)
                    continue
                return c, u
            return None
        heap = self.heap
        while heap:
            item = heapq.heappop(heap)
            c = item[6]
            if not tree.alive[c] or not tree.pending[c]:
                continue
            u = tree.pending[c][0]
            if self.policy != "bfs" and (u != item[4] or
                                         (self.policy == "lightest" and tree.through(c) != item[0])):
                self._push(tree, c)
                continue
            if keep is not None and not keep(c):
                self.parked.append(c)
                continue
            self.last = c
            return c, u
        return None

    def revive(self, tree: DecodingTree, keep: Callable[[int], bool]) -> bool:
        """Re-queue parked checks that became relevant again."""
        back, rest = [], []
        for c in dict.fromkeys(self.parked):
            if tree.alive[c] and tree.pending[c]:
                (back if keep(c) else rest).append(c)
        self.parked = rest
        for c in back:
            self._push(tree, c)
        return bool(back)


def lf_next(tree: DecodingTree, finder: LeafFinder):
    return finder.next(tree)


# ---------------------------------------------------------------------------
# bit-wise core

@dataclass
class _BitRun:
    status: str  # tight | absent | partial | incomplete
    w_T: int
    sets: list  # failure sets in local column indices, sorted
    complete: bool
    tree: DecodingTree
    proven_absent_up_to: int | None


def _failure_test(H: SparseParityCheck, root: int | None) -> Callable:
    P = set(H.punctured)
    if not P and root is not None:
        def test(S):
            return all(d != 1 for d in check_degrees(H, S).values())
        return test
    if root is None:
        return lambda S: bool(peel_decode(H, set(S) | P))
    return lambda S: root in peel_decode(H, set(S) | P)


def _grow(tree: DecodingTree, t: int, limits: SearchLimits, is_failure, policy: str, seed: int,
          deadline: float | None) -> _BitRun:
    lf = LeafFinder(policy, seed)

    def keep(c):
        return tree.through(c) <= t

    last = None
    recheck_at = None
    while True:
        wT = tree.weight
        if wT > t:
            return _BitRun("absent", wT, [], True, tree, t)
        if wT != last or (recheck_at is not None and tree.size >= recheck_at):
            last = wT
            cands = min_weight_terms(tree, wT, limits.count_cap)
            good = [S for S in cands.sets if is_failure(S)]
            if good:
                return _BitRun("tight", wT, good, cands.complete, tree,
                               wT - 1 if cands.complete else None)
            if cands.complete:
                recheck_at = None
                if wT >= t:
                    return _BitRun("absent", wT, [], True, tree, t)
            else:
                recheck_at = max(tree.size + 64, int(tree.size * 1.5))
        pos = lf.next(tree, keep)
        if pos is None and lf.revive(tree, keep):
            continue
        if pos is None:
            cands = min_weight_terms(tree, wT, limits.count_cap)
            good = [S for S in cands.sets if is_failure(S)]
            if good:
                return _BitRun("tight", wT, good, cands.complete, tree, wT - 1)
            if cands.complete:
                raise InvariantViolation("search ended with only spurious minimum-weight witnesses")
            return _BitRun("incomplete", wT, [], False, tree, None)
        if deadline is not None and time.monotonic() > deadline:
            break
        try:
            tree.grow_leaf(*pos)
        except BudgetExceeded:
            break
    tree.finalize()
    cands = min_weight_terms(tree, tree.weight, limits.count_cap)
    good = [S for S in cands.sets if is_failure(S)]
    wT = tree.weight
    if good:
        return _BitRun("tight", wT, good, cands.complete, tree, wT - 1 if cands.complete else None)
    if cands.complete and wT >= t:
        return _BitRun("absent", wT, [], True, tree, t)
    return _BitRun("partial", wT, [], False, tree, wT if cands.complete else None)


def _run_bit(H: SparseParityCheck, bit: int, t: int, limits: SearchLimits, policy="lightest",
             seed=0, deadline=None, prune=True) -> _BitRun:
    tree = init_tree(H, bit, limits.node_budget)
    if prune:
        tree.cut = t
    return _grow(tree, t, limits, _failure_test(H, bit), policy, seed, deadline)


def _lift(H: SparseParityCheck, S: Iterable[int]) -> tuple:
    out = []
    for i in S:
        lab = H.labels[i]
        if lab == MERGED_LABEL:
            raise InvariantViolation("merged column leaked into a reported set")
        out.append(lab)
    return tuple(sorted(out))


def _deadline(limits: SearchLimits) -> float | None:
    return None if limits.time_budget is None else time.monotonic() + limits.time_budget


def _tree_stats(tree: DecodingTree) -> dict:
    s = dict(tree.stats)
    s["nodes"] = tree.size
    return s


def _merge_stats(acc: dict, s: dict) -> None:
    for k, v in s.items():
        if k in ("peak", "nodes"):
            acc[k] = max(acc.get(k, 0), v)
        else:
            acc[k] = acc.get(k, 0) + v


def _report_from_run(H: SparseParityCheck, scope: str, run: _BitRun, t: int, bounds: bool,
                     eps_grid: Sequence, started: float, ub_tree: DecodingTree | None = None) -> SearchReport:
    P = sorted(H.punctured)
    pairs = sorted((_lift(H, S), S) for S in run.sets)
    sets = [a for a, _ in pairs]
    exhaustive = run.status == "absent" or (run.status == "tight" and run.complete)
    if run.status == "tight":
        w_min = run.w_T
    elif run.status == "absent":
        w_min = t
    else:
        w_min = run.proven_absent_up_to if run.proven_absent_up_to is not None else 0
    classes = [classify_pattern(H, sorted(set(S) | set(P))) for _, S in pairs]
    rep = SearchReport(scope, w_min, sets, exhaustive, run.status == "tight",
                       run.proven_absent_up_to, classes)
    if bounds:
        # pruned trees are narrower than the failure function, so bounds need their own tree
        bt = ub_tree if ub_tree is not None else run.tree
        bt.finalize()
        rep.ub_curve = ub_poly(bt)
        rep.ub_points = [(e, ub_eval(bt, e)) for e in eps_grid]
        if sets:
            rep.lb_curve = lower_bound_poly(run.sets)
    rep.stats = _tree_stats(run.tree)
    rep.stats["runtime_s"] = round(time.monotonic() - started, 6)
    rep.stats["w_T"] = run.w_T if run.w_T < INF else None
    rep.stats["status"] = run.status
    return rep


def sse_bit(H: SparseParityCheck, bit: int, limits: SearchLimits | None = None, policy: str = "lightest",
            seed: int = 0, bounds: bool = True, eps_grid: Sequence = (), split: int = 0) -> SearchReport:
    """Minimal stopping sets through one bit, up to size ``limits.t``.

    For codes with punctured bits the reported sets hold the free bits
    only; decoding fails on the bit when those and the punctured bits are
    erased.

    ``split`` > 0 first conditions on that many neighbouring bits (all
    2**split erasure patterns, see :func:`default_partition`) and searches
    each conditioned code.  On dense graphs with many short cycles this
    is much faster than one large tree; on sparse graphs it is slower.
    """
    limits = limits or SearchLimits()
    if not 0 <= bit < H.n:
        raise IndexError(f"bit {bit} out of range")
    if bit in H.shortened:
        raise ValueError("cannot search from a shortened bit")
    if split > 0 and not (H.punctured or H.shortened):
        rep = composite_sse(H, bit, default_partition(H, bit, split), limits, bounds, eps_grid)
        rep.scope = f"bit:{H.labels[bit]}"
        return rep
    started = time.monotonic()
    deadline = _deadline(limits)
    run = _run_bit(H, bit, limits.t, limits, policy, seed, deadline)
    bt = None
    if bounds:
        bt = _run_bit(H, bit, limits.t, limits, policy, seed, deadline, prune=False).tree
    return _report_from_run(H, f"bit:{H.labels[bit]}", run, limits.t, bounds, eps_grid, started, bt)


# ---------------------------------------------------------------------------
# frame-wise

@dataclass
class _Collected:
    best: int
    sets: list = field(default_factory=list)  # lifted (label) tuples, each of size best
    exhaustive: bool = True
    proven: int | None = None  # largest size with no pattern, when not exhaustive
    stats: dict = field(default_factory=dict)

    def offer(self, size: int, sets: Iterable[tuple]) -> None:
        sets = list(sets)
        if not sets:
            return
        if size < self.best:
            self.best = size
            self.sets = sets
        elif size == self.best:
            self.sets.extend(sets)


def _frame_core(H: SparseParityCheck, t: int, limits: SearchLimits, policy: str, seed: int,
                deadline, extra: Sequence[int] = ()) -> _Collected:
    """Frame-wise minimal failure patterns of the free bits, lifted and unioned with ``extra``."""
    extra = tuple(extra)
    out = _Collected(best=t)
    P = set(H.punctured)
    if P and peel_decode(H, P):
        out.best = 0
        out.sets = [tuple(sorted(extra))]
        return out
    free = list(H.free)
    for pos, k in enumerate(free):
        if out.best == 0:
            break
        Hk = shorten(H, free[:pos])
        root = k - pos
        run = _run_bit(Hk, root, out.best, limits, policy, seed, deadline)
        _merge_stats(out.stats, _tree_stats(run.tree))
        out.stats["events"] = out.stats.get("events", 0) + 1
        if run.status == "tight":
            if not run.complete:
                out.exhaustive = False
            out.offer(run.w_T, (tuple(sorted(_lift(Hk, S) + extra)) for S in run.sets))
        elif run.status != "absent":
            out.exhaustive = False
            if run.proven_absent_up_to is not None:
                out.proven = run.proven_absent_up_to if out.proven is None else min(out.proven, run.proven_absent_up_to)
            else:
                out.proven = -1
    out.sets = sorted(set(out.sets))
    return out


def _frame_ub(H: SparseParityCheck, t: int, limits: SearchLimits, eps_grid: Sequence, deadline):
    """Upper bound on the frame failure probability from the first-erased-bit partition.

    Event k (bits before the k-th free bit known, the k-th erased) is
    bounded by a tree whose auxiliary root fires when any bit fails.
    """
    free = list(H.free)
    P = set(H.punctured)
    D = t + 6
    poly = ErasurePolynomial([0], D)
    points = [0] * len(eps_grid)
    if P and peel_decode(H, P):
        return ErasurePolynomial([1], D), [(e, 1.0) for e in eps_grid]
    for pos, k in enumerate(free):
        Hk = puncture(shorten(H, free[:pos]), [k - pos])
        tree = init_frame_tree(Hk, limits.node_budget)
        _grow(tree, t, limits, _failure_test(Hk, None), "lightest", 0, deadline)
        tree.finalize()
        fac = ErasurePolynomial.event_factor(1, pos)
        poly = poly + fac * ub_poly(tree, D)
        for a, e in enumerate(eps_grid):
            points[a] += fac(e) * ub_eval(tree, e)
    return poly, list(zip(eps_grid, points))


def sse_frame(H: SparseParityCheck, limits: SearchLimits | None = None, policy: str = "lightest",
              seed: int = 0, bounds: bool = False, eps_grid: Sequence = ()) -> SearchReport:
    """All minimal stopping sets of the code up to size ``limits.t``.

    Runs one bit-wise search per free bit k on the code with the smaller
    free bits shortened, keeping a running minimum as the size limit.
    """
    limits = limits or SearchLimits()
    started = time.monotonic()
    deadline = _deadline(limits)
    col = _frame_core(H, limits.t, limits, policy, seed, deadline)
    rep = _collected_report(H, "frame", col, limits.t)
    if bounds:
        rep.ub_curve, rep.ub_points = _frame_ub(H, limits.t, limits, eps_grid, deadline)
        if rep.x_min and rep.w_min > 0:
            rep.lb_curve = lower_bound_poly([_to_local(H, S) for S in rep.x_min])
    rep.stats["runtime_s"] = round(time.monotonic() - started, 6)
    return rep


def _to_local(H: SparseParityCheck, S) -> tuple:
    pos = {lab: i for i, lab in enumerate(H.labels)}
    return tuple(pos[s] for s in S)


def _collected_report(H: SparseParityCheck, scope: str, col: _Collected, t: int, kind_check=None) -> SearchReport:
    if col.sets:
        w_min = col.best
        proven = w_min - 1 if col.exhaustive else None
    elif col.exhaustive:
        w_min, proven = t, t
    else:
        proven = col.proven if col.proven is not None and col.proven >= 0 else None
        w_min = proven if proven is not None else 0
    classes = []
    pos = {lab: i for i, lab in enumerate(H.labels)}
    for S in col.sets:
        local = [pos[s] for s in S]
        classes.append(classify_pattern(H, sorted(set(local) | set(H.punctured))))
    rep = SearchReport(scope, w_min, list(col.sets), col.exhaustive, bool(col.sets), proven, classes)
    rep.stats = dict(col.stats)
    return rep


def sse_frame_aux(H: SparseParityCheck, limits: SearchLimits | None = None) -> SearchReport:
    """Frame-wise search through a single tree with an auxiliary root (cross-check path)."""
    limits = limits or SearchLimits()
    started = time.monotonic()
    tree = init_frame_tree(H, limits.node_budget)
    run = _grow(tree, limits.t, limits, _failure_test(H, None), "lightest", 0, _deadline(limits))
    rep = _report_from_run(H, "frame", run, limits.t, False, (), started)
    return rep


# ---------------------------------------------------------------------------
# partitions

def three_event_partition(a: int, b: int) -> list:
    """{y_a = 0}, {y_a = 1, y_b = 0}, {y_a = 1, y_b = 1}."""
    if a == b:
        raise ValueError("need two distinct bits")
    return [PartitionEvent(frozenset(), frozenset({a})),
            PartitionEvent(frozenset({a}), frozenset({b})),
            PartitionEvent(frozenset({a, b}), frozenset())]


def product_partition(bits: Sequence[int]) -> list:
    bits = list(bits)
    out = []
    for mask in range(1 << len(bits)):
        ones = {b for i, b in enumerate(bits) if mask >> i & 1}
        out.append(PartitionEvent(frozenset(ones), frozenset(set(bits) - ones)))
    return out


def default_partition(H: SparseParityCheck, scope, size: int = 3) -> list:
    """Product partition on the highest-degree bits near the scope.

    For a bit scope the candidates are the bits sharing a check with it; for
    the frame scope every bit is a candidate.  Ties go to the lower index.
    """
    if scope == "frame":
        cand = set(range(H.n))
    else:
        cand = {i for j in H.col_adj[int(scope)] for i in H.row_adj[j]} - {int(scope)}
    cand -= set(H.punctured) | set(H.shortened)
    chosen = sorted(cand, key=lambda i: (-H.degree(i), i))[:size]
    return product_partition(sorted(chosen))


def validate_partition(partition: Sequence[PartitionEvent]) -> None:
    if not partition:
        raise ValueError("empty partition")
    for a, b in itertools.combinations(partition, 2):
        if not ((a.forced_one & b.forced_zero) or (a.forced_zero & b.forced_one)):
            raise ValueError(f"events {sorted(a.forced_one)}/{sorted(a.forced_zero)} and "
                             f"{sorted(b.forced_one)}/{sorted(b.forced_zero)} overlap")
    total = ErasurePolynomial([0])
    for e in partition:
        total = total + e.probability_factor
    if total != ErasurePolynomial([1]):
        raise ValueError("events do not cover the sample space")


def _condition(H: SparseParityCheck, ev: PartitionEvent) -> SparseParityCheck:
    Z = sorted(ev.forced_zero)
    Hz = shorten(H, Z)
    remap = {lab: i for i, lab in enumerate(Hz.labels)}
    return puncture(Hz, [remap[H.labels[i]] for i in ev.forced_one])


def composite_sse(H: SparseParityCheck, scope, partition: Sequence[PartitionEvent] | None = None,
                  limits: SearchLimits | None = None, bounds: bool = True, eps_grid: Sequence = ()) -> SearchReport:
    """Run the base driver on every conditioned code of a partition and recombine.

    Sets found in an event are completed with its forced-one bits; the
    bound is the probability-weighted sum of the per-event bounds.
    """
    limits = limits or SearchLimits()
    started = time.monotonic()
    deadline = _deadline(limits)
    if H.punctured or H.shortened:
        raise ValueError("composite runs start from a code without annotations")
    if partition is None:
        partition = default_partition(H, scope)
    validate_partition(partition)
    frame = scope == "frame"
    if not frame:
        bit = int(scope)
        if not 0 <= bit < H.n:
            raise IndexError("bit out of range")
    col = _Collected(best=limits.t)
    D = limits.t + 6
    ub = ErasurePolynomial([0], D)
    points = [0] * len(eps_grid)
    for ev in partition:
        if any(not 0 <= i < H.n for i in ev.forced_one | ev.forced_zero):
            raise IndexError("partition bit out of range")
        fac = ev.probability_factor
        col.stats["events"] = col.stats.get("events", 0) + 1
        if not frame and bit in ev.forced_zero:
            continue
        Hc = _condition(H, ev)
        F = tuple(sorted(H.labels[i] for i in ev.forced_one))
        te = col.best - len(F)
        if frame:
            if te >= 0:
                sub = _frame_core(Hc, te, limits, "lightest", 0, deadline, extra=F)
                _merge_stats(col.stats, sub.stats)
                if not sub.exhaustive:
                    col.exhaustive = False
                if sub.sets:
                    col.offer(sub.best + len(F), sub.sets)
            if bounds:
                p, pts = _frame_ub(Hc, max(te, 0), limits, eps_grid, deadline)
                ub = ub + fac * p
                for a, (e, v) in enumerate(pts):
                    points[a] += fac(e) * v
            continue
        root = Hc.labels.index(bit)
        if te >= 0:
            run = _run_bit(Hc, root, te, limits, "lightest", 0, deadline)
            _merge_stats(col.stats, _tree_stats(run.tree))
            if run.status == "tight":
                if not run.complete:
                    col.exhaustive = False
                col.offer(run.w_T + len(F), (tuple(sorted(_lift(Hc, S) + F)) for S in run.sets))
            elif run.status != "absent":
                col.exhaustive = False
        if bounds:
            tb = max(limits.t - len(F), 0)
            tree = _run_bit(Hc, root, tb, limits, "lightest", 0, deadline, prune=False).tree
            tree.finalize()
            ub = ub + fac * ub_poly(tree, D)
            for a, e in enumerate(eps_grid):
                points[a] += fac(e) * ub_eval(tree, e)
    col.sets = sorted(set(col.sets))
    for S in col.sets:
        if not classify_pattern(H, S).is_stopping_set:
            raise InvariantViolation(f"merged set {S} is not a stopping set")
    rep = _collected_report(H, "frame" if frame else f"bit:{bit}", col, limits.t)
    if bounds:
        rep.ub_curve = ub
        rep.ub_points = list(zip(eps_grid, points))
        if rep.x_min:
            rep.lb_curve = lower_bound_poly(rep.x_min)
    rep.stats["runtime_s"] = round(time.monotonic() - started, 6)
    return rep


# ---------------------------------------------------------------------------
# k-out trapping sets

def _check_orbit_reps(H: SparseParityCheck, k: int, gens) -> list:
    """One k-subset of checks from each orbit of the group generated by ``gens``."""
    seen, reps = set(), []
    for checks in itertools.combinations(range(H.m), k):
        if checks in seen:
            continue
        reps.append(checks)
        seen.add(checks)
        stack = [checks]
        while stack:
            c = stack.pop()
            for _, cp in gens:
                d = tuple(sorted(cp[j] for j in c))
                if d not in seen:
                    seen.add(d)
                    stack.append(d)
    return reps


def _close_under(sets, gens) -> list:
    out = set(sets)
    stack = list(out)
    while stack:
        S = stack.pop()
        for vp, _ in gens:
            T = tuple(sorted(vp[i] for i in S))
            if T not in out:
                out.add(T)
                stack.append(T)
    return sorted(out)


def _selections(H: SparseParityCheck, k: int, faithful: bool, trivial_filter: bool, check_sets=None):
    """Edge selections (checks, variables) in lexicographic order of (check, variable) pairs."""
    if check_sets is None:
        check_sets = itertools.combinations(range(H.m), k)
    for checks in check_sets:
        for vars_ in itertools.product(*(H.row_adj[j] for j in checks)):
            xp = set(vars_)
            if faithful and len(xp) < k:
                continue
            if trivial_filter and any(H.degree(i) <= k for i in xp):
                continue
            ok = True
            for j, i in zip(checks, vars_):
                for x in H.row_adj[j]:
                    if x != i and x in xp:
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                yield checks, vars_


def _selection_code(H: SparseParityCheck, checks, xp: set) -> SparseParityCheck:
    """Code whose stopping sets through the last column are the completions of ``xp``.

    Columns outside ``xp`` touching a selected check are removed (they would
    raise that check's degree), the selected checks are dropped, and ``xp``
    is merged into one punctured column.
    """
    gone = {i for j in checks for i in H.row_adj[j]} - xp
    sel = set(checks)
    keep = [i for i in range(H.n) if i not in gone and i not in xp]
    idx = {old: new for new, old in enumerate(keep)}
    star = len(keep)
    rows = []
    for j, r in enumerate(H.row_adj):
        if j in sel:
            continue
        hit = 0
        row = []
        for i in r:
            if i in xp:
                hit += 1
            elif i in idx:
                row.append(idx[i])
        if hit >= 2:
            continue
        if hit:
            row.append(star)
        rows.append(row)
    return SparseParityCheck.from_rows(rows, star + 1, punctured=frozenset({star}),
                                       labels=tuple(H.labels[i] for i in keep) + (MERGED_LABEL,))


def ktse(H: SparseParityCheck, k: int, limits: SearchLimits | None = None, trivial_filter: bool = False,
         faithful: bool = False, symmetry: Sequence[Sequence[int]] = ()) -> SearchReport:
    """All minimal k-out trapping sets up to size ``limits.t``.

    Each admissible selection of k distinct checks with one chosen
    neighbour each fixes the degree-one checks; the rest of the set must be
    a stopping set of the remaining graph containing the chosen variables.
    By default a variable may be chosen for several checks, so sets whose
    degree-one checks share a variable are found too; ``faithful`` restricts
    to distinct variables.

    ``symmetry`` lists variable permutations that are automorphisms of the
    code.  Only one check subset per orbit of the group they generate is
    searched, and the result is closed under the group.
    """
    limits = limits or SearchLimits()
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k == 0:
        rep = sse_frame(H, limits)
        rep.scope = "k_out:0"
        return rep
    if H.shortened:
        raise ValueError("shorten the code before a trapping-set search")
    gens, reps = [], None
    if symmetry:
        if H.punctured:
            raise ValueError("symmetry needs a code without annotations")
        gens = [(tuple(vp), check_permutation(H, vp)) for vp in symmetry]
        reps = _check_orbit_reps(H, k, gens)
    started = time.monotonic()
    deadline = _deadline(limits)
    col = _Collected(best=limits.t)
    col.stats = {"selections": 0, "searched": 0}
    if reps is not None:
        col.stats["check_orbits"] = len(reps)
    for checks, vars_ in _selections(H, k, faithful, trivial_filter, reps):
        col.stats["selections"] += 1
        xp = set(vars_)
        te = col.best - len(xp)
        if te < 0:
            continue
        G = _selection_code(H, checks, xp)
        col.stats["searched"] += 1
        run = _run_bit(G, G.n - 1, te, limits, "lightest", 0, deadline)
        _merge_stats(col.stats, _tree_stats(run.tree))
        base = tuple(H.labels[i] for i in xp)
        if run.status == "tight":
            if not run.complete:
                col.exhaustive = False
            col.offer(run.w_T + len(xp), (tuple(sorted(_lift(G, S) + base)) for S in run.sets))
        elif run.status != "absent":
            col.exhaustive = False
    col.sets = _close_under(col.sets, gens) if gens else sorted(set(col.sets))
    pos = {lab: i for i, lab in enumerate(H.labels)}
    for S in col.sets:
        pc = classify_pattern(H, [pos[s] for s in S])
        if pc.degree_one_checks != k or pc.size != col.best:
            raise InvariantViolation(f"set {S} classifies as {pc.label()}, expected {k}-out")
    rep = _collected_report(H, f"k_out:{k}", col, limits.t)
    rep.stats["runtime_s"] = round(time.monotonic() - started, 6)
    return rep


# ---------------------------------------------------------------------------
# uniformly good codes

@dataclass
class UniformlyGoodVerdict:
    verdict: bool | None  # None when some search was cut short
    d_target: int
    c_max: int
    witness: tuple | None = None  # (removed checks, stopping set)
    reduced_codes: int = 0


def uniformly_good_check(H: SparseParityCheck, d_target: int, c_max: int,
                         limits: SearchLimits | None = None, cross_check: bool = False) -> UniformlyGoodVerdict:
    """Does every code obtained by deleting at most ``c_max`` checks keep stopping distance >= d_target?

    When the answer is yes, no k-out trapping set with k <= c_max is
    smaller than ``d_target`` either; ``cross_check`` confirms that with
    :func:`ktse` and raises on a contradiction.
    """
    limits = (limits or SearchLimits()).with_t(d_target - 1)
    if d_target < 1:
        return UniformlyGoodVerdict(True, d_target, c_max)
    out = UniformlyGoodVerdict(True, d_target, c_max)
    for r in range(c_max + 1):
        for rows in itertools.combinations(range(H.m), r):
            kept = [row for j, row in enumerate(H.row_adj) if j not in rows]
            Hr = SparseParityCheck.from_rows(kept, H.n, labels=H.labels)
            rep = sse_frame(Hr, limits)
            out.reduced_codes += 1
            if rep.x_min:
                out.verdict = False
                out.witness = (rows, rep.x_min[0])
                return out
            if not rep.exhaustive:
                out.verdict = None
    if out.verdict and cross_check:
        for k in range(1, c_max + 1):
            rep = ktse(H, k, limits)
            if rep.x_min:
                raise InvariantViolation(f"{k}-out trapping set {rep.x_min[0]} below the certified distance")
    return out
