"""Exhaustive search for stopping sets and trapping sets of LDPC codes on the erasure channel."""

from .bounds import ErasurePolynomial, lower_bound_poly, ub_eval, ub_poly
from .exhaust import (PartitionEvent, SearchLimits, SearchReport, composite_sse, default_partition,
                      ktse, sse_bit, sse_frame, three_event_partition, uniformly_good_check)
from .kernels import BACKEND
from .simulate import brute_force_patterns, exact_curve, mc_run, peel_decode
from .tanner import (SparseParityCheck, builtin_code, c1, classify_pattern, golay23, parse_alist,
                     puncture, shorten, tanner155, write_alist)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "ErasurePolynomial", "PartitionEvent", "SearchLimits", "SearchReport",
    "SparseParityCheck", "brute_force_patterns", "builtin_code", "c1", "classify_pattern",
    "composite_sse", "default_partition", "exact_curve", "golay23", "ktse", "lower_bound_poly",
    "mc_run", "parse_alist", "peel_decode", "puncture", "shorten", "sse_bit", "sse_frame",
    "tanner155", "three_event_partition", "ub_eval", "ub_poly", "uniformly_good_check", "write_alist",
]
