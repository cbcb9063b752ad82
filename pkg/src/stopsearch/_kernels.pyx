# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: batch peeling and sized subset enumeration."""

import numpy as np
cimport numpy as cnp

cnp.import_array()

cdef enum:
    MODE_STOPPING = 0
    MODE_TRAPPING = 1
    MODE_CODEWORD = 2


def peel_batch(const int[:] rp, const int[:] ri, const int[:] cp, const int[:] ci,
               int n, int m, E):
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] R = np.array(E, dtype=np.uint8, copy=True, ndmin=2)
    cdef Py_ssize_t N = R.shape[0]
    cdef int[:] cnt = np.zeros(m, dtype=np.int32)
    cdef long[:] acc = np.zeros(m, dtype=np.int64)
    cdef int[:] queue = np.zeros(m + ci.shape[0] + 1, dtype=np.int32)
    cdef Py_ssize_t p, a, b
    cdef int i, j, head, tail, v
    cdef cnp.uint8_t[:, :] Rv = R
    for p in range(N):
        for j in range(m):
            cnt[j] = 0
            acc[j] = 0
        for i in range(n):
            if Rv[p, i]:
                for a in range(cp[i], cp[i + 1]):
                    j = ci[a]
                    cnt[j] += 1
                    acc[j] += i
        head = 0
        tail = 0
        for j in range(m):
            if cnt[j] == 1:
                queue[tail] = j
                tail += 1
        while head < tail:
            j = queue[head]
            head += 1
            if cnt[j] != 1:
                continue
            v = <int>acc[j]
            Rv[p, v] = 0
            for a in range(cp[v], cp[v + 1]):
                b = ci[a]
                cnt[b] -= 1
                acc[b] -= v
                if cnt[b] == 1:
                    # each push follows a decrement, so m + nnz slots suffice
                    queue[tail] = <int>b
                    tail += 1
    return R


cdef class _Enum:
    cdef int n, size, mode, k, bit
    cdef const int[:] cp
    cdef const int[:] ci
    cdef int[:] cnt
    cdef int ones, odd
    cdef int[:] cur
    cdef list out

    def __init__(self, const int[:] cp, const int[:] ci, int n, int m, int size,
                 int bit, int mode, int k):
        self.cp = cp
        self.ci = ci
        self.n = n
        self.size = size
        self.mode = mode
        self.k = k
        self.bit = bit
        self.cnt = np.zeros(max(m, 1), dtype=np.int32)
        self.cur = np.zeros(max(size, 1), dtype=np.int32)
        self.ones = 0
        self.odd = 0
        self.out = []

    cdef inline void add(self, int i):
        cdef Py_ssize_t a
        cdef int j, c
        for a in range(self.cp[i], self.cp[i + 1]):
            j = self.ci[a]
            c = self.cnt[j] + 1
            self.cnt[j] = c
            if c == 1:
                self.ones += 1
            elif c == 2:
                self.ones -= 1
            if c & 1:
                self.odd += 1
            else:
                self.odd -= 1

    cdef inline void remove(self, int i):
        cdef Py_ssize_t a
        cdef int j, c
        for a in range(self.cp[i], self.cp[i + 1]):
            j = self.ci[a]
            c = self.cnt[j] - 1
            self.cnt[j] = c
            if c == 1:
                self.ones += 1
            elif c == 0:
                self.ones -= 1
            if c & 1:
                self.odd += 1
            else:
                self.odd -= 1

    cdef inline bint ok(self):
        if self.mode == MODE_CODEWORD:
            return self.odd == 0
        if self.mode == MODE_TRAPPING:
            return self.ones == self.k
        return self.ones == 0

    cdef void rec(self, int depth, int start):
        cdef int i
        if depth == self.size:
            if self.ok():
                self.out.append(tuple(self.cur))
            return
        for i in range(start, self.n - (self.size - depth) + 1):
            if i == self.bit:
                continue
            self.cur[depth] = i
            self.add(i)
            self.rec(depth + 1, i + 1)
            self.remove(i)

    def run(self):
        cdef int first = 0
        if self.bit >= 0:
            self.cur[0] = self.bit
            self.add(self.bit)
            first = 1
        self.rec(first, 0)
        return self.out


def enumerate_size(const int[:] rp, const int[:] ri, const int[:] cp, const int[:] ci,
                   int n, int m, int size, int bit, int mode, int k):
    if size <= 0 or size > n:
        return np.zeros((0, max(size, 0)), dtype=np.int32)
    e = _Enum(cp, ci, n, m, size, bit, mode, k)
    rows = e.run()
    if not rows:
        return np.zeros((0, size), dtype=np.int32)
    out = np.array(rows, dtype=np.int32).reshape(len(rows), size)
    out.sort(axis=1)
    return out
