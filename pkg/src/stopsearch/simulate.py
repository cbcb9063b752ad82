"""Ground truth: peeling decoder, Monte Carlo, brute-force pattern search, exact curves."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from . import kernels
from .bounds import ErasurePolynomial
from .tanner import SparseParityCheck, as_support

PATTERN_CEILING = 50_000_000
EXACT_MAX_FREE = 20


def _indicator(H: SparseParityCheck, erased: Iterable[int]) -> np.ndarray:
    e = np.zeros((1, H.n), dtype=np.uint8)
    idx = list(erased)
    if idx:
        e[0, idx] = 1
    return e


def peel_decode(H: SparseParityCheck, erased: Iterable[int]) -> tuple:
    """Residual erasures left by the peeling decoder (the largest stopping set inside ``erased``)."""
    S = as_support(erased, H.n)
    if not S:
        return ()
    R = kernels.peel_batch(H, _indicator(H, S))
    return tuple(np.flatnonzero(R[0]).tolist())


def peel_batch(H: SparseParityCheck, E) -> np.ndarray:
    """Residual indicator for each row of a 0/1 erasure matrix."""
    return kernels.peel_batch(H, np.ascontiguousarray(E, dtype=np.uint8))


@dataclass
class McEstimate:
    eps: float
    trials: int
    frame_errors: int
    bit_errors: list
    harvested: list = field(default_factory=list)
    seed: int = 0

    @property
    def fer(self) -> float:
        return self.frame_errors / self.trials if self.trials else 0.0

    @property
    def ber(self) -> list:
        return [b / self.trials if self.trials else 0.0 for b in self.bit_errors]

    @staticmethod
    def _ci(p: float, n: int) -> float:
        return 1.96 * math.sqrt(max(p * (1 - p), 0.0) / n) if n else float("inf")

    @property
    def fer_ci95(self) -> float:
        return self._ci(self.fer, self.trials)

    def ber_ci95(self, bit: int) -> float:
        return self._ci(self.ber[bit], self.trials)

    def to_json(self) -> dict:
        return {"eps": self.eps, "trials": self.trials, "frame_errors": self.frame_errors,
                "fer": self.fer, "fer_ci95": self.fer_ci95, "bit_errors": self.bit_errors,
                "harvested": [list(s) for s in self.harvested], "seed": self.seed}


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(block,))))


def mc_run(H: SparseParityCheck, eps: float, trials: int | None = None, errors: int | None = None,
           seed: int = 0, block: int = 1 << 15, max_trials: int = 10**9,
           harvest: bool = True, harvest_cap: int = 1000) -> McEstimate:
    """Monte-Carlo peeling over i.i.d. erasures.

    Stop after ``trials`` trials, or once ``errors`` frame errors are seen
    (then the count ends exactly at the trial producing the last needed
    error).  Trial ``t`` draws from the stream of block ``t // block``, so
    results depend only on (seed, eps, stop rule).
    """
    if trials is None and errors is None:
        raise ValueError("give trials or errors")
    if not 0 <= eps <= 1:
        raise ValueError("eps must lie in [0, 1]")
    limit = trials if trials is not None else max_trials
    free = np.ones(H.n, dtype=bool)
    forced = np.zeros(H.n, dtype=bool)
    for i in H.shortened:
        free[i] = False
    for i in H.punctured:
        free[i] = False
        forced[i] = True
    done = 0
    fe = 0
    bit_err = np.zeros(H.n, dtype=np.int64)
    seen: dict = {}
    b = 0
    while done < limit:
        size = min(block, limit - done)
        rng = _block_rng(seed, b)
        E = (rng.random((block, H.n)) < eps)[:size]
        E = (E & free) | forced
        R = peel_batch(H, E).astype(bool)
        fail = R.any(axis=1)
        if errors is not None and fe + int(fail.sum()) >= errors:
            cut = int(np.flatnonzero(fail)[errors - fe - 1]) + 1
            R, fail, size = R[:cut], fail[:cut], cut
        fe += int(fail.sum())
        bit_err += R.sum(axis=0)
        if harvest:
            for row in R[fail]:
                if len(seen) >= harvest_cap:
                    break
                seen.setdefault(tuple(np.flatnonzero(row).tolist()), None)
        done += size
        b += 1
        if errors is not None and fe >= errors:
            break
    return McEstimate(eps, done, fe, bit_err.tolist(), sorted(seen), seed)


_KINDS = {"stopping": kernels.MODE_STOPPING, "trapping": kernels.MODE_TRAPPING,
          "codeword": kernels.MODE_CODEWORD}


def brute_force_patterns(H: SparseParityCheck, t: int, kind: str = "stopping", bit: int | None = None,
                         k: int = 0, ceiling: int = PATTERN_CEILING):
    """Smallest nonempty sets of the given kind with at most ``t`` elements.

    ``kind`` is ``stopping``, ``codeword`` or ``trapping`` (exactly ``k``
    degree-one checks).  Returns ``(size, sets)``, or ``(t, [])`` if none.
    Puncture/shorten annotations are ignored: the test is purely combinatorial.
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    if bit is not None and not 0 <= bit < H.n:
        raise IndexError("bit out of range")
    if kind == "stopping":
        k = 0
    t = min(t, H.n)
    total = sum(math.comb(H.n - 1, s - 1) if bit is not None else math.comb(H.n, s) for s in range(1, t + 1))
    if total > ceiling:
        raise ValueError(f"{total} subsets exceed the enumeration ceiling {ceiling}")
    for s in range(1, t + 1):
        rows = kernels.enumerate_size(H, s, -1 if bit is None else bit, _KINDS[kind], k)
        if len(rows):
            return s, sorted(tuple(r) for r in rows.tolist())
    return max(t, 0), []


def _all_patterns(nbits: int, start: int, stop: int) -> np.ndarray:
    x = np.arange(start, stop, dtype=np.int64)
    return ((x[:, None] >> np.arange(nbits)) & 1).astype(np.uint8)


def exact_curve(H: SparseParityCheck, scope="frame") -> ErasurePolynomial:
    """Exact failure probability of peeling as a polynomial in eps.

    ``scope`` is ``"frame"`` (any residual) or a bit index (residual
    contains it).  Punctured bits are always erased and shortened bits never,
    so the polynomial is in the free bits only.
    """
    free = list(H.free)
    f = len(free)
    if f > EXACT_MAX_FREE:
        raise ValueError(f"{f} free bits; exact curves need at most {EXACT_MAX_FREE}")
    if scope != "frame" and not 0 <= int(scope) < H.n:
        raise IndexError("bit out of range")
    counts = [0] * (f + 1)
    chunk = 1 << 16
    for start in range(0, 1 << f, chunk):
        stop = min(1 << f, start + chunk)
        sub = _all_patterns(f, start, stop)
        E = np.zeros((stop - start, H.n), dtype=np.uint8)
        E[:, free] = sub
        for i in H.punctured:
            E[:, i] = 1
        R = peel_batch(H, E)
        fail = R.any(axis=1) if scope == "frame" else R[:, int(scope)].astype(bool)
        w = sub.sum(axis=1)
        counts_here = np.bincount(w[fail], minlength=f + 1)
        for d in range(f + 1):
            counts[d] += int(counts_here[d])
    return ErasurePolynomial.from_weight_counts(counts, f)
