"""Parity-check codes as sparse Tanner graphs.

A :class:`SparseParityCheck` is immutable.  Conditioning operations
(:func:`shorten`, :func:`puncture`, :func:`remove_checks`,
:func:`merge_columns`) return new graphs and keep a ``labels`` tuple that
maps every current column back to the column of the code it came from, so
results found on a conditioned code can be reported in original indices.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

SupportSet = tuple  # canonical strictly increasing tuple of variable indices

MERGED_LABEL = -1


class AlistError(ValueError):
    """Malformed alist input.  ``line`` is 1-based (0 when not line specific)."""

    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def as_support(indices: Iterable[int], n: int | None = None) -> SupportSet:
    out = tuple(sorted(set(int(i) for i in indices)))
    if n is not None and out and (out[0] < 0 or out[-1] >= n):
        raise IndexError(f"support {out} out of range for n={n}")
    return out


@dataclass(frozen=True, eq=False)
class SparseParityCheck:
    n: int
    m: int
    row_adj: tuple
    col_adj: tuple
    punctured: frozenset = frozenset()
    shortened: frozenset = frozenset()
    labels: tuple = field(default=())

    def __post_init__(self):
        if len(self.row_adj) != self.m or len(self.col_adj) != self.n:
            raise ValueError("adjacency sizes do not match (n, m)")
        edges_r = set()
        for j, row in enumerate(self.row_adj):
            if len(set(row)) != len(row):
                raise ValueError(f"duplicate edge in check {j}")
            for i in row:
                if not 0 <= i < self.n:
                    raise IndexError(f"check {j} references variable {i}")
                edges_r.add((j, i))
        edges_c = {(j, i) for i, col in enumerate(self.col_adj) for j in col}
        if edges_r != edges_c or sum(map(len, self.col_adj)) != len(edges_r):
            raise ValueError("row_adj and col_adj describe different edge sets")
        if self.punctured & self.shortened:
            raise ValueError("a variable cannot be both punctured and shortened")
        for s in (self.punctured, self.shortened):
            if any(not 0 <= i < self.n for i in s):
                raise IndexError("annotation index out of range")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(self.n)))
        elif len(self.labels) != self.n:
            raise ValueError("labels must have one entry per column")

    # construction ---------------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Iterable[int]], n: int, **kw) -> "SparseParityCheck":
        row_adj = tuple(tuple(sorted(int(i) for i in r)) for r in rows)
        cols: list[list[int]] = [[] for _ in range(n)]
        for j, r in enumerate(row_adj):
            if len(set(r)) != len(r):
                raise ValueError(f"duplicate edge in check {j}")
            for i in r:
                if not 0 <= i < n:
                    raise IndexError(f"check {j} references variable {i}")
                cols[i].append(j)
        return cls(n=n, m=len(row_adj), row_adj=row_adj,
                   col_adj=tuple(tuple(c) for c in cols), **kw)

    @classmethod
    def from_dense(cls, H, **kw) -> "SparseParityCheck":
        A = np.asarray(H, dtype=np.int64)
        if A.ndim != 2:
            raise ValueError("dense matrix must be 2-D")
        if ((A != 0) & (A != 1)).any():
            raise ValueError("dense matrix must be binary")
        rows = [np.flatnonzero(r).tolist() for r in A]
        return cls.from_rows(rows, A.shape[1], **kw)

    # views ------------------------------------------------------------------
    def to_dense(self) -> np.ndarray:
        A = np.zeros((self.m, self.n), dtype=np.uint8)
        for j, r in enumerate(self.row_adj):
            A[j, list(r)] = 1
        return A

    @cached_property
    def csr(self):
        """(row_ptr, row_idx, col_ptr, col_idx) int32 arrays for the kernels."""
        rp = np.zeros(self.m + 1, dtype=np.int32)
        rp[1:] = np.cumsum([len(r) for r in self.row_adj])
        ri = np.fromiter((i for r in self.row_adj for i in r), dtype=np.int32, count=int(rp[-1]))
        cp = np.zeros(self.n + 1, dtype=np.int32)
        cp[1:] = np.cumsum([len(c) for c in self.col_adj])
        ci = np.fromiter((j for c in self.col_adj for j in c), dtype=np.int32, count=int(cp[-1]))
        return rp, ri, cp, ci

    @property
    def free(self) -> tuple:
        return tuple(i for i in range(self.n) if i not in self.punctured and i not in self.shortened)

    def degree(self, i: int) -> int:
        return len(self.col_adj[i])

    def checksum(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.n} {self.m}\n".encode())
        for r in self.row_adj:
            h.update((" ".join(map(str, r)) + "\n").encode())
        h.update(f"P{sorted(self.punctured)}S{sorted(self.shortened)}".encode())
        return h.hexdigest()

    def __eq__(self, other):
        if not isinstance(other, SparseParityCheck):
            return NotImplemented
        return (self.n, self.m, self.row_adj, self.punctured, self.shortened, self.labels) == (
            other.n, other.m, other.row_adj, other.punctured, other.shortened, other.labels)

    def __hash__(self):
        return hash((self.n, self.m, self.row_adj, self.punctured, self.shortened, self.labels))

    def __repr__(self):
        return f"SparseParityCheck(n={self.n}, m={self.m}, edges={sum(map(len, self.row_adj))})"


# ---------------------------------------------------------------------------
# classification

@dataclass(frozen=True)
class PatternClass:
    degree_one_checks: int
    odd_degree_checks: int
    size: int

    @property
    def kind(self) -> str:
        if self.size == 0:
            return "empty"
        if self.odd_degree_checks == 0:
            return "codeword_support"
        if self.degree_one_checks == 0:
            return "stopping_set"
        return "k_out_trapping"

    @property
    def k(self) -> int:
        return self.degree_one_checks

    @property
    def is_stopping_set(self) -> bool:
        # the empty set counts, vacuously
        return self.degree_one_checks == 0

    def label(self) -> str:
        kind = self.kind
        return f"k_out_trapping({self.k})" if kind == "k_out_trapping" else kind

    def memberships(self) -> list:
        """Every class the set belongs to, most specific first."""
        if self.size == 0:
            return ["empty"]
        out = [self.label()]
        if self.kind == "codeword_support":
            out.append("stopping_set")
        return out

    def to_json(self) -> dict:
        return {"kind": self.label(), "memberships": self.memberships(), "degree_one_checks": self.degree_one_checks,
                "odd_degree_checks": self.odd_degree_checks, "size": self.size}


def check_degrees(H: SparseParityCheck, S: Iterable[int]) -> dict:
    """Induced degree of every check touched by ``S``."""
    deg: dict = {}
    for i in S:
        for j in H.col_adj[i]:
            deg[j] = deg.get(j, 0) + 1
    return deg


def classify_pattern(H: SparseParityCheck, S: Iterable[int]) -> PatternClass:
    S = as_support(S, H.n)
    deg = check_degrees(H, S)
    ones = sum(1 for d in deg.values() if d == 1)
    odd = sum(1 for d in deg.values() if d & 1)
    return PatternClass(ones, odd, len(S))


# ---------------------------------------------------------------------------
# conditioning

def _remap(H: SparseParityCheck, keep: list[int]) -> dict:
    return {old: new for new, old in enumerate(keep)}


def shorten(H: SparseParityCheck, S: Iterable[int]) -> SparseParityCheck:
    """Delete the columns in ``S`` (bits known to be 0).  Checks stay, possibly empty."""
    S = set(as_support(S, H.n))
    if not S:
        return H
    keep = [i for i in range(H.n) if i not in S]
    idx = _remap(H, keep)
    rows = [[idx[i] for i in r if i in idx] for r in H.row_adj]
    return SparseParityCheck.from_rows(
        rows, len(keep),
        punctured=frozenset(idx[i] for i in H.punctured if i in idx),
        shortened=frozenset(idx[i] for i in H.shortened if i in idx),
        labels=tuple(H.labels[i] for i in keep))


def annotate_shortened(H: SparseParityCheck, S: Iterable[int]) -> SparseParityCheck:
    """Mark bits as known-0 without deleting their columns."""
    S = frozenset(as_support(S, H.n))
    return SparseParityCheck(H.n, H.m, H.row_adj, H.col_adj, H.punctured - S,
                             H.shortened | S, H.labels) if S else H


def puncture(H: SparseParityCheck, S: Iterable[int]) -> SparseParityCheck:
    """Mark bits as always erased."""
    S = frozenset(as_support(S, H.n))
    if S & H.shortened:
        raise ValueError("cannot puncture a shortened bit")
    return SparseParityCheck(H.n, H.m, H.row_adj, H.col_adj, H.punctured | S,
                             H.shortened, H.labels) if S else H


def remove_checks(H: SparseParityCheck, rows: Iterable[int]) -> SparseParityCheck:
    drop = set(rows)
    if any(not 0 <= j < H.m for j in drop):
        raise IndexError("check index out of range")
    kept = [r for j, r in enumerate(H.row_adj) if j not in drop]
    return SparseParityCheck.from_rows(kept, H.n, punctured=H.punctured,
                                       shortened=H.shortened, labels=H.labels)


def check_permutation(H: SparseParityCheck, vperm: Sequence[int]) -> tuple:
    """The check permutation induced by the variable permutation ``vperm``.

    Raises ValueError unless ``vperm`` maps every check onto a check.
    """
    if sorted(vperm) != list(range(H.n)):
        raise ValueError("not a permutation of the variables")
    where = {frozenset(r): j for j, r in enumerate(H.row_adj)}
    out = []
    for r in H.row_adj:
        j = where.get(frozenset(vperm[i] for i in r))
        if j is None:
            raise ValueError("permutation is not an automorphism of the code")
        out.append(j)
    return tuple(out)


def block_shift(n: int, p: int) -> tuple:
    """Cyclic shift by one inside each block of ``p`` consecutive variables."""
    if p < 1 or n % p:
        raise ValueError(f"block size {p} does not divide n = {n}")
    return tuple((i // p) * p + (i % p + 1) % p for i in range(n))


def merge_columns(H: SparseParityCheck, cols: Iterable[int]) -> tuple[SparseParityCheck, int]:
    """Collapse ``cols`` into one punctured super-column.

    Stopping sets of the result that contain the super-column correspond
    exactly to stopping sets of ``H`` that contain every column of ``cols``
    (with the super-column swapped for ``cols``).  A check meeting two or
    more merged columns has degree >= 2 in any such set, so it is dropped.
    Returns the new code and the index of the super-column (always last).
    """
    C = set(as_support(cols, H.n))
    if not C:
        raise ValueError("nothing to merge")
    if C & H.shortened:
        raise ValueError("cannot merge shortened columns")
    keep = [i for i in range(H.n) if i not in C]
    idx = _remap(H, keep)
    star = len(keep)
    rows = []
    for r in H.row_adj:
        hit = sum(1 for i in r if i in C)
        if hit >= 2:
            continue
        rows.append([idx[i] for i in r if i in idx] + ([star] if hit else []))
    return SparseParityCheck.from_rows(
        rows, star + 1,
        punctured=frozenset(idx[i] for i in H.punctured if i in idx) | {star},
        shortened=frozenset(idx[i] for i in H.shortened if i in idx),
        labels=tuple(H.labels[i] for i in keep) + (MERGED_LABEL,)), star


# ---------------------------------------------------------------------------
# alist

def parse_alist(text) -> SparseParityCheck:
    if isinstance(text, (bytes, bytearray)):
        text = text.decode("ascii", errors="replace")
    lines = [(k + 1, ln.split()) for k, ln in enumerate(text.splitlines())]
    lines = [(k, toks) for k, toks in lines if toks]
    pos = 0

    def take(count: int | None = None, what: str = ""):
        nonlocal pos
        if pos >= len(lines):
            raise AlistError(f"unexpected end of file reading {what}",
                             lines[-1][0] if lines else 0)
        k, toks = lines[pos]
        pos += 1
        try:
            vals = [int(t) for t in toks]
        except ValueError:
            raise AlistError(f"non-integer token in {what}", k) from None
        if count is not None and len(vals) != count:
            raise AlistError(f"expected {count} integers in {what}, got {len(vals)}", k)
        return k, vals

    k, (n, m) = take(2, "header")
    if n < 0 or m < 0:
        raise AlistError("negative dimension", k)
    k, (maxc, maxr) = take(2, "max degrees")
    kc, cdeg = take(n, "column degrees")
    kr, rdeg = take(m, "row degrees")
    if any(d > maxc or d < 0 for d in cdeg):
        raise AlistError("column degree exceeds declared maximum", kc)
    if any(d > maxr or d < 0 for d in rdeg):
        raise AlistError("row degree exceeds declared maximum", kr)

    def neighbor_lists(count, degs, bound, what):
        out = []
        for a in range(count):
            k, vals = take(None, what)
            nz = [v for v in vals if v != 0]
            if len(nz) != degs[a]:
                raise AlistError(f"{what} {a + 1}: degree {degs[a]} but {len(nz)} entries", k)
            if any(v < 1 or v > bound for v in nz):
                raise AlistError(f"{what} {a + 1}: index out of range", k)
            if len(set(nz)) != len(nz):
                raise AlistError(f"{what} {a + 1}: duplicate edge", k)
            out.append((k, [v - 1 for v in nz]))
        return out

    cols = neighbor_lists(n, cdeg, m, "column")
    rows = neighbor_lists(m, rdeg, n, "row")
    ec = {(j, i) for i, (_, c) in enumerate(cols) for j in c}
    er = {(j, i) for j, (_, r) in enumerate(rows) for i in r}
    if ec != er:
        j, i = sorted(ec ^ er)[0]
        line = rows[j][0] if (j, i) in er else cols[i][0]
        raise AlistError(f"column and row lists disagree on edge (check {j + 1}, variable {i + 1})", line)
    return SparseParityCheck.from_rows([r for _, r in rows], n)


def write_alist(H: SparseParityCheck) -> str:
    maxc = max((len(c) for c in H.col_adj), default=0)
    maxr = max((len(r) for r in H.row_adj), default=0)
    out = [f"{H.n} {H.m}", f"{maxc} {maxr}",
           " ".join(str(len(c)) for c in H.col_adj),
           " ".join(str(len(r)) for r in H.row_adj)]
    for c in H.col_adj:
        out.append(" ".join(str(j + 1) for j in c) + " 0" * (maxc - len(c)))
    for r in H.row_adj:
        out.append(" ".join(str(i + 1) for i in r) + " 0" * (maxr - len(r)))
    return "\n".join(s.strip() for s in out) + "\n"


# ---------------------------------------------------------------------------
# built-in codes

C1_ROWS = ("111000", "010101", "001110", "100011")

GOLAY_PARITY_ROWS = (
    "100111000111", "101011011001", "101101101010", "101110110100",
    "110011101100", "110101110001", "110110011010", "111001010110",
    "111010100011", "111100001101", "011111111111",
)

TANNER_EXPONENTS = ((1, 2, 4, 8, 16), (5, 10, 20, 9, 18), (25, 19, 7, 14, 28))


def _from_bitstrings(rows) -> SparseParityCheck:
    return SparseParityCheck.from_dense([[int(c) for c in r] for r in rows])


def c1() -> SparseParityCheck:
    return _from_bitstrings(C1_ROWS)


def golay23() -> SparseParityCheck:
    """Golay (23,12): the 11x12 parity part followed by an 11x11 identity."""
    rows = [p + "".join("1" if a == j else "0" for a in range(11))
            for j, p in enumerate(GOLAY_PARITY_ROWS)]
    return _from_bitstrings(rows)


def tanner155(right_shift: bool = False) -> SparseParityCheck:
    """(155,64) quasi-cyclic code from 31x31 circulant permutations.

    Block (a, b) is the identity cyclically shifted by ``TANNER_EXPONENTS[a][b]``.
    With the default left shift, row ``r`` of a block has its one in column
    ``(r - s) mod 31``; ``right_shift`` uses ``(r + s) mod 31``.
    """
    p = 31
    sign = 1 if right_shift else -1
    rows = []
    for a, exps in enumerate(TANNER_EXPONENTS):
        for r in range(p):
            rows.append([b * p + (r + sign * s) % p for b, s in enumerate(exps)])
    return SparseParityCheck.from_rows(rows, 5 * p)


def _pair_sockets(var_deg: list[int], chk_deg: list[int], rng, attempts: int) -> list[list[int]]:
    vs = np.repeat(np.arange(len(var_deg)), var_deg)
    cs = np.repeat(np.arange(len(chk_deg)), chk_deg)
    if len(vs) != len(cs):
        raise ValueError(f"infeasible degree profile: {len(vs)} variable sockets, {len(cs)} check sockets")
    for _ in range(attempts):
        perm = rng.permutation(len(cs))
        pairs = cs[perm] * len(var_deg) + vs
        if len(np.unique(pairs)) == len(pairs):
            rows: list[list[int]] = [[] for _ in chk_deg]
            for j, i in zip(cs[perm].tolist(), vs.tolist()):
                rows[j].append(i)
            return rows
    raise RuntimeError(f"resampling budget exhausted after {attempts} attempts")


def regular(dv: int, dc: int, n: int, seed: int, attempts: int = 100_000) -> SparseParityCheck:
    if dv < 1 or dc < 1 or n < 1:
        raise ValueError("degrees and length must be positive")
    if (n * dv) % dc:
        raise ValueError(f"infeasible degree profile: n*dv={n * dv} not divisible by dc={dc}")
    m = n * dv // dc
    rng = np.random.default_rng(seed)
    rows = _pair_sockets([dv] * n, [dc] * m, rng, attempts)
    return SparseParityCheck.from_rows(rows, n)


def _node_counts(coeffs: Sequence[float], total: int) -> list[int]:
    """Largest-remainder rounding of node counts from edge-perspective coefficients.

    ``coeffs[d]`` is the fraction of edges attached to nodes of degree d+1.
    """
    w = np.array([c / (d + 1) for d, c in enumerate(coeffs)], dtype=float)
    if w.sum() <= 0 or (w < 0).any():
        raise ValueError("degree distribution must be nonnegative and nonzero")
    raw = total * w / w.sum()
    base = np.floor(raw).astype(int)
    rem = total - base.sum()
    for d in np.argsort(-(raw - base), kind="stable")[:rem]:
        base[d] += 1
    return base.tolist()


def irregular(lam: Sequence[float], rho: Sequence[float], n: int, seed: int,
              attempts: int = 100_000) -> SparseParityCheck:
    vcount = _node_counts(lam, n)
    edges = sum((d + 1) * c for d, c in enumerate(vcount))
    r = np.array([c / (d + 1) for d, c in enumerate(rho)], dtype=float)
    m = int(round(edges * r.sum() / sum(c for c in rho)))
    ccount = _node_counts(rho, m)
    if sum((d + 1) * c for d, c in enumerate(ccount)) != edges:
        raise ValueError("infeasible degree profile: edge counts of the two sides differ")
    var_deg = [d + 1 for d, c in enumerate(vcount) for _ in range(c)]
    chk_deg = [d + 1 for d, c in enumerate(ccount) for _ in range(c)]
    rng = np.random.default_rng(seed)
    rows = _pair_sockets(var_deg, chk_deg, rng, attempts)
    return SparseParityCheck.from_rows(rows, n)


def builtin_code(name: str, params: Sequence = (), seed: int | None = None, **kw) -> SparseParityCheck:
    name = name.lower()
    if name == "c1":
        return c1()
    if name == "golay23":
        return golay23()
    if name == "tanner155":
        return tanner155(**kw)
    if name in ("regular", "irregular"):
        if seed is None:
            raise ValueError(f"{name} codes need a seed")
        if name == "regular":
            dv, dc, n = (int(p) for p in params)
            return regular(dv, dc, n, seed)
        lam, rho, n = params
        return irregular(lam, rho, int(n), seed)
    raise ValueError(f"unknown builtin code {name!r}")
