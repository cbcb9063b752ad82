"""The decoding tree: a monotone AND/OR formula grown from a Tanner graph.

Variable nodes are AND gates (own erasure indicator times all incoming
check messages); check nodes are OR gates.  Growth only narrows the
function, so at every stage the tree's function dominates the true
peeling-decoder indicator of the root bit.  When a new active leaf shares
its observation with an existing active node whose youngest common ancestor
is a variable node, the tree is pivoted on that observation so that every
variable node keeps statistically independent inputs.

Besides the formula, each node carries an exact minimum witness weight
``w``: the smallest number of active observations that can drive the node
to 1, with pending (not yet expanded) positions counting as free ones.
Because children of a variable node never share observations, the weight
is additive at variable nodes and a minimum at check nodes.

Nodes live in parallel arrays indexed by integer id.  Dead nodes stay in
the arena with ``alive`` cleared.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .tanner import SparseParityCheck

VAR, CHK = 0, 1
ACTIVE, ZERO, ONE = 0, 1, 2
AUX = -1
INF = 1 << 40

STATUS_NAMES = {ACTIVE: "active", ZERO: "inactive_zero", ONE: "inactive_one"}


class BudgetExceeded(RuntimeError):
    """A mutation would push the live node count past the budget; nothing was changed."""


class InvariantViolation(AssertionError):
    pass


class DecodingTree:
    def __init__(self, H: SparseParityCheck, budget: int = 2_000_000):
        self.H = H
        self.budget = int(budget)
        self.kind: list[int] = []
        self.tan: list[int] = []
        self.status: list[int] = []
        self.obs: list[int] = []
        self.parent: list[int] = []
        self.children: list[list[int]] = []
        self.depth: list[int] = []
        self.alive: list[bool] = []
        self.pending: list = []
        self.lid: list[int] = []
        self.w: list[int] = []
        self.size = 0
        self.root = 0
        self.active_index: dict[int, dict[int, None]] = {}
        self.fresh: list[int] = []  # checks whose pending lists the leaf finder has not seen
        self.finalized = False
        self.iteration = 0
        self.stats = {"grows": 0, "plain": 0, "rule4": 0, "pivots": 0, "zero_drops": 0, "peak": 0}
        self._lid_map: dict = {}
        self.ldepth: list[int] = []
        self._blocked = H.shortened
        # exhaustion mode: delete variable nodes that only take part in witnesses heavier than cut
        self.cut: int | None = None
        self._swept_size = 0

    # -- construction helpers ---------------------------------------------
    def _new(self, kind, tan, status, obs, parent, depth, lid) -> int:
        x = len(self.kind)
        self.kind.append(kind)
        self.tan.append(tan)
        self.status.append(status)
        self.obs.append(obs)
        self.parent.append(parent)
        self.children.append([])
        self.depth.append(depth)
        self.alive.append(True)
        self.pending.append([] if kind == CHK else None)
        self.lid.append(lid)
        self.w.append(0)
        self.size += 1
        if status == ACTIVE:
            self.active_index.setdefault(obs, {})[x] = None
        return x

    def _logical(self, parent_lid: int, check: int, var: int) -> int:
        key = (parent_lid, check, var)
        got = self._lid_map.get(key)
        if got is None:
            got = len(self.ldepth)
            self._lid_map[key] = got
            self.ldepth.append(self.ldepth[parent_lid] + 1)
        return got

    def _check_plan(self, u: int, exclude: int):
        """Candidate lists for the check children of a new variable ``u``; None if constant 0."""
        H = self.H
        plan = []
        for j in H.col_adj[u]:
            if j == exclude:
                continue
            cand = [x for x in H.row_adj[j] if x != u and x not in self._blocked]
            if not cand:
                return None
            plan.append((j, cand))
        return plan

    def _attach_checks(self, v: int, plan) -> None:
        d = self.depth[v] + 1
        lv = self.lid[v]
        for j, cand in plan:
            c = self._new(CHK, j, -1, -1, v, d, lv)
            self.pending[c] = cand
            self.children[v].append(c)
            self.fresh.append(c)

    # -- queries --------------------------------------------------------------
    def is_ancestor(self, a: int, b: int) -> bool:
        """True if ``a`` is ``b`` or one of its ancestors."""
        da = self.depth[a]
        parent, depth = self.parent, self.depth
        while depth[b] > da:
            b = parent[b]
        return a == b

    def lca(self, a: int, b: int) -> int:
        parent, depth = self.parent, self.depth
        while depth[a] > depth[b]:
            a = parent[a]
        while depth[b] > depth[a]:
            b = parent[b]
        while a != b:
            a = parent[a]
            b = parent[b]
        return a

    def find_yca(self, leaf: int):
        """(yca, partner) for an active leaf, or None when its observation is unshared."""
        return self._yca_from(self.parent[leaf], self.obs[leaf], exclude=leaf)

    def _yca_from(self, c: int, k: int, exclude: int = -1):
        # yca of a (would-be) leaf under check c with every active partner of k
        best = None
        bd = -1
        part = self.active_index.get(k)
        if not part:
            return None
        depth = self.depth
        for p in reversed(part):
            if p == exclude:
                continue
            a = self.lca(c, p)
            if depth[a] > bd:
                bd = depth[a]
                best = (a, p)
        return best

    def positions(self):
        for c in range(len(self.kind)):
            if self.alive[c] and self.kind[c] == CHK and self.pending[c]:
                for u in self.pending[c]:
                    yield c, u

    def position_key(self, c: int, u: int):
        """Logical (depth, id) of the variable a position would create."""
        lid = self._logical(self.lid[c], self.tan[c], u)
        return self.ldepth[lid], lid

    def through(self, c: int) -> int:
        """Least witness weight at the root among witnesses that use a pending leaf of ``c``."""
        parent, w = self.parent, self.w
        acc = 0
        x = c
        root = self.root
        while True:
            v = parent[x]
            if v == root:
                break
            pc = parent[v]
            acc += w[v] - w[pc]
            x = pc
        return w[root] + acc

    def through_node(self, x: int) -> int:
        """Least root witness weight among witnesses that use node ``x``."""
        if x == self.root:
            return self.w[x]
        if self.kind[x] == CHK:
            return self.through_node(self.parent[x])
        c = self.parent[x]
        return self.through(c) - self.w[c] + self.w[x]

    @property
    def weight(self) -> int:
        return self.w[self.root]

    def live_nodes(self) -> list[int]:
        out, stack = [], [self.root]
        while stack:
            x = stack.pop()
            out.append(x)
            stack.extend(self.children[x])
        return out

    def postorder(self) -> list[int]:
        order = self.live_nodes()
        order.reverse()
        return order

    # -- weights ------------------------------------------------------------
    def _recompute(self, x: int) -> int:
        ch = self.children[x]
        w = self.w
        if self.kind[x] == VAR:
            st = self.status[x]
            if st == ZERO:
                return INF
            s = 1 if st == ACTIVE else 0
            for y in ch:
                s += w[y]
            return s if s < INF else INF
        if self.pending[x]:
            return 0
        return min((w[y] for y in ch), default=INF)

    def _propagate(self, x: int) -> None:
        w, parent = self.w, self.parent
        while x != -1:
            nw = self._recompute(x)
            if nw == w[x]:
                return
            w[x] = nw
            x = parent[x]

    def _recompute_subtree(self, top: int) -> None:
        stack, order = [top], []
        while stack:
            x = stack.pop()
            order.append(x)
            stack.extend(self.children[x])
        for x in reversed(order):
            self.w[x] = self._recompute(x)

    # -- deletion -------------------------------------------------------------
    def _kill_subtree(self, top: int) -> None:
        stack = [top]
        while stack:
            x = stack.pop()
            if not self.alive[x]:
                continue
            self.alive[x] = False
            self.size -= 1
            if self.kind[x] == VAR and self.status[x] == ACTIVE:
                self.active_index[self.obs[x]].pop(x, None)
            stack.extend(self.children[x])
            self.children[x] = []
            if self.kind[x] == CHK:
                self.pending[x] = []

    def prune_zero(self, v: int) -> None:
        """Hardwire variable ``v`` to 0 and propagate the constant upward."""
        while True:
            if self.kind[v] != VAR:
                raise InvariantViolation("prune_zero expects a variable node")
            if self.status[v] == ACTIVE:
                self.active_index[self.obs[v]].pop(v, None)
            self.status[v] = ZERO
            for c in self.children[v]:
                self._kill_subtree(c)
            self.children[v] = []
            self.w[v] = INF
            if v == self.root:
                return
            c = self.parent[v]
            self.children[c].remove(v)
            self._kill_subtree(v)
            if self.children[c] or self.pending[c]:
                self._propagate(c)
                return
            # the check lost its last input: it is constant 0, and so is its parent
            p = self.parent[c]
            self.children[p].remove(c)
            self._kill_subtree(c)
            v = p

    def _drop_var(self, x: int) -> None:
        c = self.parent[x]
        self.children[c].remove(x)
        self._kill_subtree(x)
        if self.children[c] or self.pending[c]:
            self._propagate(c)
            return
        p = self.parent[c]
        self.children[p].remove(c)
        self._kill_subtree(c)
        self.prune_zero(p)

    def sweep(self, top: int | None = None) -> int:
        """Delete variable nodes whose every witness weighs more than ``cut``.

        Only patterns larger than ``cut`` lose their witnesses, so the
        minimum-weight witnesses up to ``cut`` are untouched.  Returns the
        number of deleted subtrees.
        """
        if self.cut is None or not self.alive[self.root]:
            return 0
        if top is None:
            top = self.root
            self._swept_size = self.size
        if not self.alive[top]:
            return 0
        cut, w, kind, ch = self.cut, self.w, self.kind, self.children
        drop = []
        stack = [(top, self.through_node(top))]
        while stack:
            x, th = stack.pop()
            if kind[x] == VAR:
                if th > cut and x != self.root:
                    drop.append(x)
                    continue
                for c in ch[x]:
                    stack.append((c, th))
            else:
                wc = w[x]
                for y in ch[x]:
                    stack.append((y, th - wc + w[y]))
        for x in drop:
            if self.alive[x]:
                self._drop_var(x)
        return len(drop)

    # -- growth ---------------------------------------------------------------
    def grow_leaf(self, c: int, u: int) -> str:
        """Expand pending position (c, u).  Returns the outcome name."""
        if self.finalized:
            raise InvariantViolation("tree is finalized")
        if not (self.alive[c] and self.kind[c] == CHK and u in self.pending[c]):
            raise InvariantViolation(f"position ({c}, {u}) is not live")
        H = self.H
        plan = self._check_plan(u, self.tan[c])
        if plan is None:
            # u is recovered through a degree-1 check, so this input is constant 0
            self.pending[c].remove(u)
            self.stats["zero_drops"] += 1
            self.stats["grows"] += 1
            self.iteration += 1
            if not self.pending[c] and not self.children[c]:
                p = self.parent[c]
                self.children[p].remove(c)
                self._kill_subtree(c)
                self.prune_zero(p)
            else:
                self._propagate(c)
            return "zero_drop"

        punct = u in H.punctured
        hit = None if punct else self._yca_from(c, u)
        outcome = "plain_add"
        status = ONE if punct else ACTIVE
        pivot_plan = None
        if hit is not None:
            a, p = hit
            if self.kind[a] == VAR:
                if a == p:
                    status = ONE
                    outcome = "rule4_add"
                else:
                    outcome = "pivoted"
                    pivot_plan = a
        need = 1 + len(plan)
        if pivot_plan is not None:
            need += self._pivot_cost(pivot_plan, u, c)
        if self.size + need > self.budget:
            raise BudgetExceeded(f"need {need} nodes, {self.budget - self.size} left")

        lid = self._logical(self.lid[c], self.tan[c], u)
        v = self._new(VAR, u, status, u, c, self.depth[c] + 1, lid)
        self.pending[c].remove(u)
        self.children[c].append(v)
        self._attach_checks(v, plan)
        self.w[v] = self._recompute(v)
        self._propagate(c)
        if pivot_plan is not None:
            self.pivot(pivot_plan, u)
        if self.cut is not None and self.size > 2 * max(self._swept_size, 256):
            self.sweep()
        self.stats["grows"] += 1
        self.stats["plain" if outcome == "plain_add" else "rule4" if outcome == "rule4_add" else "pivots"] += 1
        self.stats["peak"] = max(self.stats["peak"], self.size)
        self.iteration += 1
        return outcome

    # -- pivoting -------------------------------------------------------------
    def _implicated_children(self, v: int, k: int, extra: int = -1) -> list[int]:
        dv = self.depth[v]
        found: dict[int, None] = {}
        nodes = list(self.active_index.get(k, ()))
        if extra >= 0:
            nodes.append(extra)
        for x in nodes:
            if self.depth[x] <= dv:
                continue
            y = x
            while self.depth[y] > dv + 1:
                y = self.parent[y]
            if self.parent[y] == v:
                found[y] = None
        return list(found)

    def _condition(self, tops, k: int):
        """One bottom-up pass over the subtrees at ``tops`` with y_k fixed both ways.

        Returns (zero, w0, w1): the nodes that are constant 0 when y_k = 0,
        the witness weights when y_k = 0 (constant-0 nodes left out) and
        the witness weights when y_k = 1.
        """
        order, stack = [], list(tops)
        ch = self.children
        while stack:
            x = stack.pop()
            order.append(x)
            stack.extend(ch[x])
        kind, status, obs, pend = self.kind, self.status, self.obs, self.pending
        zero: set = set()
        w0: dict = {}
        w1: dict = {}
        for x in reversed(order):
            if kind[x] == VAR:
                st = status[x]
                if st == ZERO:
                    zero.add(x)
                    w1[x] = INF
                    continue
                a = 1 if st == ACTIVE else 0
                s1 = 0 if (a and obs[x] == k) else a
                z = a and obs[x] == k
                s0 = a
                for y in ch[x]:
                    s1 += w1[y]
                    if y in zero:
                        z = True
                    elif not z:
                        s0 += w0[y]
                w1[x] = s1 if s1 < INF else INF
                if z:
                    zero.add(x)
                else:
                    w0[x] = s0 if s0 < INF else INF
            elif pend[x]:
                w1[x] = w0[x] = 0
            else:
                w1[x] = min((w1[y] for y in ch[x]), default=INF)
                live = [w0[y] for y in ch[x] if y not in zero]
                if live:
                    w0[x] = min(live)
                else:
                    zero.add(x)
        return zero, w0, w1

    def _count_within(self, top: int, th: int, wk: dict) -> int:
        n, stack = 0, [(top, th)]
        kind, ch, cut = self.kind, self.children, self.cut
        while stack:
            x, t = stack.pop()
            if x not in wk or (kind[x] == VAR and t > cut):
                continue
            n += 1
            if kind[x] == VAR:
                stack.extend((y, t) for y in ch[x])
            else:
                wx = wk[x]
                stack.extend((y, t - wx + wk[y]) for y in ch[x] if y in wk)
        return n

    def _subtree_size(self, top: int) -> int:
        n, stack = 0, [top]
        while stack:
            x = stack.pop()
            n += 1
            stack.extend(self.children[x])
        return n

    def _pivot_cost(self, v: int, k: int, c: int) -> int:
        # upper bound: one full copy of both implicated inputs; the new leaf sits under c
        dv = self.depth[v]
        y = c
        while self.depth[y] > dv + 1:
            y = self.parent[y]
        kids = set(self._implicated_children(v, k)) | {y}
        return 3 + sum(self._subtree_size(g) for g in kids)

    def pivot(self, v: int, k: int) -> None:
        """Condition the two inputs of ``v`` that both depend on y_k.

        The pair (g, h) is replaced by an auxiliary check whose inputs are
        ``y_k * g(1) h(1)`` (left) and ``g(0) h(0)`` (right, constant-0
        parts left out).  One side reuses the existing nodes and the other
        is a copy.  Normally the left side reuses them; with a cut set, the
        side keeping more nodes within the cut does, and nodes heavier than
        the cut are left out of both.
        """
        if self.kind[v] != VAR:
            raise InvariantViolation("pivot site must be a variable node")
        kids = self._implicated_children(v, k)
        if len(kids) != 2:
            raise InvariantViolation(f"pivot at {v} on y{k}: {len(kids)} implicated inputs, expected 2")
        g, h = kids
        zero, w0, w1 = self._condition((g, h), k)
        has_right = g not in zero and h not in zero
        has_left = True
        th0 = th1 = None
        move_right = False
        cut = self.cut
        if cut is not None:
            base = self.through_node(v) - self.w[g] - self.w[h]
            th1 = base + 1 + w1[g] + w1[h]
            has_left = th1 <= cut
            if has_right:
                th0 = base + w0[g] + w0[h]
                has_right = th0 <= cut
            if not (has_left or has_right):
                # every witness through v is heavier than the cut
                for x in (g, h):
                    self.children[v].remove(x)
                    self._kill_subtree(x)
                if v == self.root:
                    self.prune_zero(v)
                else:
                    self._drop_var(v)
                return
            if has_left and has_right:
                n1 = self._count_within(g, th1, w1) + self._count_within(h, th1, w1)
                n0 = self._count_within(g, th0, w0) + self._count_within(h, th0, w0)
                move_right = n0 > n1
            else:
                move_right = has_right
        dv = self.depth[v]
        self.children[v] = [x for x in self.children[v] if x not in (g, h)]
        A = self._new(CHK, AUX, -1, -1, v, dv + 1, -1)
        self.children[v].append(A)
        L = R = None
        if has_left:
            L = self._new(VAR, AUX, ACTIVE, k, A, dv + 2, self.lid[v])
            self.children[A].append(L)
            self.w[L] = min(1 + w1[g] + w1[h], INF)
        if has_right:
            R = self._new(VAR, AUX, ONE, -1, A, dv + 2, self.lid[v])
            self.children[A].append(R)
            self.w[R] = min(w0[g] + w0[h], INF)
        for top in (g, h):
            if move_right:
                if L is not None:
                    self._copy_into(top, L, w1, th1, one_k=k)
                self._move_under(top, R, w0, th0, zero=zero)
            else:
                if R is not None:
                    self._copy_into(top, R, w0, th0, zero=zero)
                if L is not None:
                    self._move_under(top, L, w1, th1, one_k=k)
                else:
                    self._kill_subtree(top)
        if L is not None:
            # L was registered by _new before the moved nodes were removed; re-insert as newest
            part = self.active_index[k]
            part.pop(L, None)
            part[L] = None
        self.w[A] = self._recompute(A)
        self._propagate(v)

    def _move_under(self, top: int, new_parent: int, wk: dict, th, one_k: int | None = None,
                    zero: set | None = None) -> None:
        """Re-hang ``top`` two levels lower under a conditioned side.

        ``one_k`` sets y_k = 1 in place; ``zero`` drops the y_k = 0
        constants.  With ``th`` given (the through-weight of ``top``),
        variable nodes heavier than the cut are dropped as well.
        """
        self.parent[top] = new_parent
        self.children[new_parent].append(top)
        part = self.active_index.get(one_k, {}) if one_k is not None else None
        kind, status, obs, ch, w, depth = self.kind, self.status, self.obs, self.children, self.w, self.depth
        cut = self.cut
        stack = [(top, th)]
        while stack:
            x, t = stack.pop()
            depth[x] += 2
            w[x] = wk[x]
            if kind[x] == VAR:
                if one_k is not None and status[x] == ACTIVE and obs[x] == one_k:
                    status[x] = ONE
                    part.pop(x, None)
                stack.extend((y, t) for y in ch[x])
                continue
            keep = []
            wx = wk[x]
            for y in ch[x]:
                if zero is not None and y in zero:
                    self._kill_subtree(y)
                    continue
                ty = None if t is None else t - wx + wk[y]
                if ty is not None and ty > cut:
                    self._kill_subtree(y)
                    continue
                keep.append(y)
                stack.append((y, ty))
            ch[x] = keep

    def _copy_into(self, top: int, parent: int, wk: dict, th, one_k: int | None = None,
                   zero: set | None = None) -> None:
        """Copy the subtree at ``top`` under ``parent`` with y_k conditioned.

        ``one_k`` hardwires y_k = 1 in the copy and ``zero`` lists nodes left
        out.  With ``th`` given, variable nodes heavier than the cut are
        skipped; a check within the cut keeps its lightest input, so no
        constant-0 check is created.  Weights come from ``wk``.
        """
        stack = [(top, parent, th)]
        cut = self.cut
        kind, status, obs, ch = self.kind, self.status, self.obs, self.children
        while stack:
            x, p, t = stack.pop()
            if zero is not None and x in zero:
                continue
            if t is not None and kind[x] == VAR and t > cut:
                continue
            st = status[x]
            if one_k is not None and st == ACTIVE and obs[x] == one_k:
                st = ONE
            y = self._new(kind[x], self.tan[x], st, obs[x], p, self.depth[p] + 1, self.lid[x])
            ch[p].append(y)
            self.w[y] = wk[x]
            if kind[x] == CHK and self.pending[x]:
                self.pending[y] = list(self.pending[x])
                self.fresh.append(y)
            if t is None or kind[x] == VAR:
                for c in ch[x]:
                    stack.append((c, y, t))
            else:
                wx = wk[x]
                for c in ch[x]:
                    if zero is None or c not in zero:
                        stack.append((c, y, t - wx + wk[c]))

    # -- finishing ------------------------------------------------------------
    def finalize(self) -> None:
        """Materialize every pending position as a hardwired-one leaf without children."""
        if self.finalized:
            return
        for c in list(range(len(self.kind))):
            if self.alive[c] and self.kind[c] == CHK and self.pending[c]:
                for u in self.pending[c]:
                    v = self._new(VAR, u, ONE, u, c, self.depth[c] + 1, -1)
                    self.children[c].append(v)
                self.pending[c] = []
        self.fresh = []
        self.finalized = True

    # -- evaluation -----------------------------------------------------------
    def eval_function(self, y) -> int:
        """Value of the tree's Boolean function on erasure indicator vector ``y``."""
        val = {}
        for x in self.postorder():
            if self.kind[x] == VAR:
                st = self.status[x]
                r = 0 if st == ZERO else (int(bool(y[self.obs[x]])) if st == ACTIVE else 1)
                if r:
                    for c in self.children[x]:
                        if not val[c]:
                            r = 0
                            break
            else:
                r = 1 if self.pending[x] else int(any(val[c] for c in self.children[x]))
            val[x] = r
        return val[self.root]

    def eval_batch(self, Y: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`eval_function` over the rows of a boolean matrix."""
        Y = np.asarray(Y, dtype=bool)
        N = Y.shape[0]
        ones = np.ones(N, dtype=bool)
        val = {}
        for x in self.postorder():
            if self.kind[x] == VAR:
                st = self.status[x]
                if st == ZERO:
                    r = np.zeros(N, dtype=bool)
                else:
                    r = Y[:, self.obs[x]].copy() if st == ACTIVE else ones.copy()
                    for c in self.children[x]:
                        r &= val.pop(c)
            else:
                if self.pending[x]:
                    r = ones.copy()
                else:
                    r = np.zeros(N, dtype=bool)
                    for c in self.children[x]:
                        r |= val.pop(c)
            val[x] = r
        return val[self.root]

    # -- diagnostics ----------------------------------------------------------
    def dump(self) -> str:
        """S-expression text form, e.g. ``(v1:active (c0 (v0:active) ...))``."""
        def rec(x):
            if self.kind[x] == VAR:
                tag = "aux" if self.tan[x] == AUX else f"v{self.tan[x]}"
                st = STATUS_NAMES[self.status[x]]
                if self.status[x] == ACTIVE and self.tan[x] == AUX:
                    st += f"[{self.obs[x]}]"
                head = f"{tag}:{st}"
            else:
                head = "aux" if self.tan[x] == AUX else f"c{self.tan[x]}"
                if self.pending[x]:
                    head += "?" + ",".join(map(str, self.pending[x]))
            inner = " ".join(rec(y) for y in self.children[x])
            return f"({head}{' ' + inner if inner else ''})"
        return rec(self.root)

    def check_invariants(self) -> None:
        """Full structural audit.  Raises :class:`InvariantViolation`."""
        live = self.live_nodes()
        if len(live) != self.size:
            raise InvariantViolation(f"size {self.size} but {len(live)} reachable nodes")
        if self.size > self.budget and not self.finalized:
            raise InvariantViolation("node budget exceeded")
        seen_active: dict[int, set] = {}
        H = self.H
        for x in live:
            if not self.alive[x]:
                raise InvariantViolation(f"dead node {x} reachable")
            for y in self.children[x]:
                if self.parent[y] != x or self.depth[y] != self.depth[x] + 1:
                    raise InvariantViolation(f"bad link {x}->{y}")
                if self.kind[x] == VAR and self.kind[y] != CHK:
                    raise InvariantViolation("variable node with variable child")
                if self.kind[x] == CHK and self.kind[y] != VAR:
                    raise InvariantViolation("check node with check child")
                if self.kind[x] == CHK and self.tan[x] != AUX and self.tan[y] == AUX:
                    raise InvariantViolation("auxiliary variable below a Tanner check")
            if self.kind[x] == VAR and self.status[x] == ACTIVE:
                if not 0 <= self.obs[x] < H.n:
                    raise InvariantViolation("active node with invalid observation")
                seen_active.setdefault(self.obs[x], set()).add(x)
            if self.kind[x] == CHK:
                if self.pending[x]:
                    if self.tan[x] == AUX and x != self._frame_check:
                        raise InvariantViolation("pending leaves under an auxiliary check")
                    row = set(H.row_adj[self.tan[x]]) if self.tan[x] != AUX else set(range(H.n))
                    added = {self.tan[y] for y in self.children[x]}
                    for u in self.pending[x]:
                        if u not in row or u in added:
                            raise InvariantViolation(f"stale position ({x}, {u})")
                elif not self.children[x]:
                    raise InvariantViolation(f"constant-0 check {x} left in tree")
            if self.w[x] != self._recompute(x):
                raise InvariantViolation(f"stale weight at {x}")
        indexed = {k: set(v) for k, v in self.active_index.items() if v}
        if indexed != seen_active:
            raise InvariantViolation("active index out of sync")
        for k, group in seen_active.items():
            g = sorted(group)
            for a in range(len(g)):
                for b in range(a + 1, len(g)):
                    if self.kind[self.lca(g[a], g[b])] != CHK:
                        raise InvariantViolation(f"observation {k}: inputs not independent")

    _frame_check = -1


def init_tree(H: SparseParityCheck, root_bit: int, budget: int = 2_000_000) -> DecodingTree:
    if not 0 <= root_bit < H.n:
        raise IndexError(f"root bit {root_bit} out of range")
    T = DecodingTree(H, budget)
    if budget < 1 + H.degree(root_bit):
        raise BudgetExceeded("budget smaller than the root neighborhood")
    T.ldepth.append(0)
    if root_bit in H.shortened:
        T.root = T._new(VAR, root_bit, ZERO, root_bit, -1, 0, 0)
        T.w[T.root] = INF
        return T
    status = ONE if root_bit in H.punctured else ACTIVE
    T.root = T._new(VAR, root_bit, status, root_bit, -1, 0, 0)
    plan = T._check_plan(root_bit, -2)
    if plan is None:
        T.status[T.root] = ZERO
        if status == ACTIVE:
            T.active_index[root_bit].pop(T.root)
        T.w[T.root] = INF
        return T
    T._attach_checks(T.root, plan)
    T.w[T.root] = T._recompute(T.root)
    return T


def init_frame_tree(H: SparseParityCheck, budget: int = 2_000_000,
                    candidates: Iterable[int] | None = None) -> DecodingTree:
    """Tree whose root fires iff some bit in ``candidates`` is not recovered.

    The root is an auxiliary hardwired-one variable with a single
    auxiliary check whose pending inputs are the candidate bits (all
    unshortened bits by default).  Bits expanded under it keep every one of
    their Tanner checks.
    """
    T = DecodingTree(H, budget)
    T.ldepth.append(0)
    T.root = T._new(VAR, AUX, ONE, -1, -1, 0, 0)
    if candidates is None:
        candidates = [i for i in range(H.n) if i not in H.shortened]
    cand = [i for i in candidates if i not in H.shortened]
    if not cand:
        T.status[T.root] = ZERO
        T.w[T.root] = INF
        return T
    c = T._new(CHK, AUX, -1, -1, T.root, 1, 0)
    T.pending[c] = list(cand)
    T.children[T.root].append(c)
    T.fresh.append(c)
    T._frame_check = c
    T.w[T.root] = T._recompute(T.root)
    return T
