"""Kernel selection: the compiled extension when importable, numpy otherwise.

Set ``STOPSEARCH_PURE=1`` to force the fallback.
"""

from __future__ import annotations

import os

from . import _kernels_py

MODE_STOPPING = _kernels_py.MODE_STOPPING
MODE_TRAPPING = _kernels_py.MODE_TRAPPING
MODE_CODEWORD = _kernels_py.MODE_CODEWORD

_impl = _kernels_py
if os.environ.get("STOPSEARCH_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "compiled" if _impl is not _kernels_py else "python"


def peel_batch(H, E):
    rp, ri, cp, ci = H.csr
    return _impl.peel_batch(rp, ri, cp, ci, H.n, H.m, E)


def enumerate_size(H, size: int, bit: int = -1, mode: int = MODE_STOPPING, k: int = 0):
    rp, ri, cp, ci = H.csr
    return _impl.enumerate_size(rp, ri, cp, ci, H.n, H.m, size, bit, mode, k)
