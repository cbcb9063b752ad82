"""Erasure-probability polynomials and bounds read off a decoding tree.

Upper bounds evaluate the tree bottom-up as if all messages were
independent (exact at variable nodes by construction, an over-estimate at
check nodes whose inputs are positively correlated).  Lower bounds come from
inclusion-exclusion over a list of known stopping sets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterable, Sequence

from .booltree import ACTIVE, CHK, INF, ONE, VAR, ZERO, DecodingTree


class ErasurePolynomial:
    """Polynomial in the erasure probability, optionally truncated above a degree.

    ``coeffs[d]`` is the coefficient of eps**d (int or Fraction).
    ``truncation_degree`` is None for an exact polynomial.
    """

    __slots__ = ("coeffs", "truncation_degree")

    def __init__(self, coeffs: Iterable = (), truncation_degree: int | None = None):
        cs = list(coeffs)
        if truncation_degree is not None:
            cs = cs[: truncation_degree + 1]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        self.truncation_degree = truncation_degree

    @classmethod
    def monomial(cls, degree: int, coeff=1) -> "ErasurePolynomial":
        return cls([0] * degree + [coeff])

    @classmethod
    def from_weight_counts(cls, counts: Sequence[int], n: int) -> "ErasurePolynomial":
        """sum_w counts[w] eps^w (1-eps)^(n-w), expanded exactly."""
        out = [0] * (n + 1)
        for w, c in enumerate(counts):
            if not c:
                continue
            for j in range(n - w + 1):
                out[w + j] += c * comb(n - w, j) * (-1 if j & 1 else 1)
        return cls(out)

    @classmethod
    def event_factor(cls, ones: int, zeros: int) -> "ErasurePolynomial":
        """eps^ones (1-eps)^zeros."""
        return cls.from_weight_counts([0] * ones + [1], ones + zeros)

    @property
    def order(self) -> int | None:
        for d, c in enumerate(self.coeffs):
            if c != 0:
                return d
        return None

    @property
    def multiplicity(self):
        d = self.order
        return None if d is None else self.coeffs[d]

    def __call__(self, eps):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * eps + c
        return acc

    def _trunc(self, other) -> int | None:
        ts = [t for t in (self.truncation_degree, getattr(other, "truncation_degree", None)) if t is not None]
        return min(ts) if ts else None

    def __add__(self, other):
        if not isinstance(other, ErasurePolynomial):
            other = ErasurePolynomial([other])
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0] * (n - len(self.coeffs))
        for d, c in enumerate(other.coeffs):
            a[d] += c
        return ErasurePolynomial(a, self._trunc(other))

    __radd__ = __add__

    def __neg__(self):
        return ErasurePolynomial([-c for c in self.coeffs], self.truncation_degree)

    def __sub__(self, other):
        return self + (-other if isinstance(other, ErasurePolynomial) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, ErasurePolynomial):
            return ErasurePolynomial([c * other for c in self.coeffs], self.truncation_degree)
        D = self._trunc(other)
        a, b = self.coeffs, other.coeffs
        size = len(a) + len(b) - 1 if a and b else 0
        if D is not None:
            size = min(size, D + 1)
        out = [0] * max(size, 0)
        for i, x in enumerate(a):
            if not x or i >= len(out):
                continue
            for j, y in enumerate(b):
                if i + j >= len(out):
                    break
                out[i + j] += x * y
        return ErasurePolynomial(out, D)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, ErasurePolynomial):
            other = ErasurePolynomial([other])
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for d, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}" if d == 0 else f"{c}*e^{d}")
        tail = f" + O(e^{self.truncation_degree + 1})" if self.truncation_degree is not None else ""
        return " + ".join(terms) + tail

    def to_json(self) -> list:
        out = []
        for d, c in enumerate(self.coeffs):
            if c:
                f = Fraction(c)
                out.append([d, f.numerator, f.denominator])
        return out

    @classmethod
    def from_json(cls, data, truncation_degree=None) -> "ErasurePolynomial":
        deg = max((d for d, _, _ in data), default=-1)
        cs = [0] * (deg + 1)
        for d, a, b in data:
            cs[d] = Fraction(a, b) if b != 1 else a
        return cls(cs, truncation_degree)


# ---------------------------------------------------------------------------
# upper bounds from a tree

def ub_eval(tree: DecodingTree, eps) -> float:
    """Independence-style evaluation of the tree at erasure probability ``eps``."""
    if not 0 <= eps <= 1:
        raise ValueError("eps must lie in [0, 1]")
    val = {}
    kind, status, ch, pend = tree.kind, tree.status, tree.children, tree.pending
    for x in tree.postorder():
        if kind[x] == VAR:
            st = status[x]
            r = 0 if st == ZERO else (eps if st == ACTIVE else 1)
            for c in ch[x]:
                r = r * val.pop(c)
        elif pend[x]:
            for c in ch[x]:
                val.pop(c)
            r = 1
        else:
            q = 1
            for c in ch[x]:
                q = q * (1 - val.pop(c))
            r = 1 - q
        val[x] = r
    return val[tree.root]


def _pmul(a: list, b: list, D: int) -> list:
    out = [0] * min(len(a) + len(b) - 1, D + 1)
    for i, x in enumerate(a):
        if x:
            for j in range(min(len(b), len(out) - i)):
                out[i + j] += x * b[j]
    return out


def ub_poly(tree: DecodingTree, D: int | None = None) -> ErasurePolynomial:
    """Power series of :func:`ub_eval` in eps, truncated at degree ``D`` (default weight + 6)."""
    if D is None:
        w = tree.weight
        D = (w if w < INF else 0) + 6
    if D < 1:
        raise ValueError("truncation degree must be >= 1")
    val = {}
    kind, status, ch, pend = tree.kind, tree.status, tree.children, tree.pending
    for x in tree.postorder():
        if kind[x] == VAR:
            st = status[x]
            r = [0] if st == ZERO else ([0, 1] if st == ACTIVE else [1])
            for c in ch[x]:
                r = _pmul(r, val.pop(c), D)
        elif pend[x]:
            for c in ch[x]:
                val.pop(c)
            r = [1]
        else:
            q = [1]
            for c in ch[x]:
                u = val.pop(c)
                one_minus = [-v for v in u] or [0]
                one_minus[0] += 1
                q = _pmul(q, one_minus, D)
            r = [-v for v in q]
            r[0] += 1
        val[x] = r
    return ErasurePolynomial(val[tree.root], D)


# ---------------------------------------------------------------------------
# minimal-weight witnesses

@dataclass
class CandidateCollection:
    weight: int
    sets: list = field(default_factory=list)
    complete: bool = True


def _bits(mask: int) -> tuple:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


def min_weight_terms(tree: DecodingTree, weight_cap: int | None = None,
                     count_cap: int = 100_000) -> CandidateCollection:
    """All minimum-cardinality observation sets that drive the root to 1."""
    W = tree.weight
    if W >= INF or (weight_cap is not None and W > weight_cap):
        return CandidateCollection(W, [], True)
    kind, status, ch, pend, w, obs = tree.kind, tree.status, tree.children, tree.pending, tree.w, tree.obs
    need, stack = [], [tree.root]
    while stack:
        x = stack.pop()
        need.append(x)
        if kind[x] == VAR:
            stack.extend(ch[x])
        elif not pend[x]:
            wx = w[x]
            stack.extend(y for y in ch[x] if w[y] == wx)
    fam: dict = {}
    complete = True
    for x in reversed(need):
        if kind[x] == VAR:
            cur = {1 << obs[x]} if status[x] == ACTIVE else {0}
            for c in ch[x]:
                other = fam.pop(c)
                cur = {a | b for a in cur for b in other}
                if len(cur) > count_cap:
                    cur = set(sorted(cur)[:count_cap])
                    complete = False
        elif pend[x]:
            cur = {0}
        else:
            wx = w[x]
            cur = set()
            for c in ch[x]:
                if w[c] == wx:
                    cur |= fam.pop(c)
            if len(cur) > count_cap:
                cur = set(sorted(cur)[:count_cap])
                complete = False
        fam[x] = cur
    sets = sorted(_bits(m) for m in fam[tree.root])
    return CandidateCollection(W, sets, complete)


@dataclass
class TightnessVerdict:
    w_T: int
    x_min_ss: list
    tight: bool
    exhausted_up_to: int | None


def confirm_tightness(H, root_bit: int, candidates: CandidateCollection, is_failure=None) -> TightnessVerdict:
    """Keep the candidates that really are failure patterns containing the root.

    ``is_failure(S)`` decides that; by default a set is accepted when the
    peeling residual of S plus the punctured bits contains ``root_bit``.
    """
    if not candidates.complete:
        raise ValueError("candidate list is incomplete")
    if is_failure is None:
        from .simulate import peel_decode
        P = set(H.punctured)

        def is_failure(S):
            return root_bit in peel_decode(H, set(S) | P)
    ss = [S for S in candidates.sets if is_failure(S)]
    tight = bool(ss)
    return TightnessVerdict(candidates.weight, ss, tight, None if tight else candidates.weight)


# ---------------------------------------------------------------------------
# lower bounds

def lower_bound_poly(sets: Sequence[Sequence[int]], exact_threshold: int = 20) -> ErasurePolynomial:
    """Probability that at least one listed set is fully erased (or a Bonferroni lower bound).

    With at most ``exact_threshold`` sets the union probability is computed
    exactly by inclusion-exclusion; above that the second-order Bonferroni
    bound S1 - S2 is returned.
    """
    masks = []
    seen = set()
    for S in sets:
        m = 0
        for i in S:
            m |= 1 << int(i)
        if m in seen:
            continue
        seen.add(m)
        masks.append(m)
    if not masks:
        raise ValueError("need at least one set")
    counts: dict[int, int] = {}
    if len(masks) <= exact_threshold:
        # signed union-size counts, built one set at a time
        acc: dict[int, int] = {}
        for m in masks:
            new = {m: 1}
            for u, c in acc.items():
                v = u | m
                new[v] = new.get(v, 0) - c
            for u, c in new.items():
                acc[u] = acc.get(u, 0) + c
            acc = {u: c for u, c in acc.items() if c}
        for u, c in acc.items():
            d = u.bit_count() if hasattr(u, "bit_count") else bin(u).count("1")
            counts[d] = counts.get(d, 0) + c
    else:
        for m in masks:
            d = bin(m).count("1")
            counts[d] = counts.get(d, 0) + 1
        for a, b in combinations(masks, 2):
            d = bin(a | b).count("1")
            counts[d] = counts.get(d, 0) - 1
    deg = max(counts)
    cs = [0] * (deg + 1)
    for d, c in counts.items():
        cs[d] += c
    return ErasurePolynomial(cs)
