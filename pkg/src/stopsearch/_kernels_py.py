"""Numpy implementations of the hot kernels.

Same signatures as the compiled ``_kernels`` module; used when the
extension is not built or ``STOPSEARCH_PURE=1`` is set.
"""

from __future__ import annotations

from itertools import combinations, islice

import numpy as np

MODE_STOPPING = 0
MODE_TRAPPING = 1
MODE_CODEWORD = 2

_CHUNK = 1 << 16


def _dense(rp, ri, n, m) -> np.ndarray:
    A = np.zeros((m, n), dtype=np.float32)
    for j in range(m):
        A[j, ri[rp[j]:rp[j + 1]]] = 1.0
    return A


def peel_batch(rp, ri, cp, ci, n: int, m: int, E) -> np.ndarray:
    """Residual of the peeling decoder for each row of ``E`` (uint8, N x n)."""
    E = np.array(E, dtype=bool, copy=True)
    if E.size == 0 or m == 0:
        return E.astype(np.uint8)
    A = _dense(rp, ri, n, m)
    active = np.arange(E.shape[0])
    while active.size:
        sub = E[active]
        cnt = sub.astype(np.float32) @ A.T
        hit = (cnt == 1.0).astype(np.float32) @ A
        rec = sub & (hit > 0)
        changed = rec.any(axis=1)
        sub[rec] = False
        E[active] = sub
        active = active[changed]
    return E.astype(np.uint8)


def enumerate_size(rp, ri, cp, ci, n: int, m: int, size: int, bit: int,
                   mode: int, k: int) -> np.ndarray:
    """All subsets of ``size`` columns (containing ``bit`` when >= 0) of the given kind."""
    if size <= 0 or size > n:
        return np.zeros((0, max(size, 0)), dtype=np.int32)
    A = _dense(rp, ri, n, m).T.copy()  # n x m
    if bit >= 0:
        rest = [i for i in range(n) if i != bit]
        gen = ((bit,) + c for c in combinations(rest, size - 1))
    else:
        gen = combinations(range(n), size)
    found = []
    while True:
        block = list(islice(gen, _CHUNK))
        if not block:
            break
        C = np.array(block, dtype=np.int32).reshape(len(block), size)
        cnt = A[C].sum(axis=1)
        if mode == MODE_CODEWORD:
            ok = ~(cnt.astype(np.int32) & 1).any(axis=1)
        else:
            ones = (cnt == 1.0).sum(axis=1)
            ok = ones == (k if mode == MODE_TRAPPING else 0)
        if ok.any():
            found.append(C[ok])
    if not found:
        return np.zeros((0, size), dtype=np.int32)
    out = np.concatenate(found)
    out.sort(axis=1)
    return out
