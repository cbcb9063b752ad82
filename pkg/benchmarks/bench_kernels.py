"""Compare the compiled kernels with the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import time

import numpy as np

from stopsearch import _kernels_py, tanner

try:
    from stopsearch import _kernels
except ImportError:
    _kernels = None


def timed(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = [("python", _kernels_py)] + ([("compiled", _kernels)] if _kernels else [])
    if _kernels is None:
        print("compiled extension not built; timing the fallback only")

    cases = []
    for name, H, eps, N in (("golay23", tanner.golay23(), 0.15, 20000),
                            ("regular(3,6,96)", tanner.regular(3, 6, 96, 0), 0.35, 20000),
                            ("tanner155", tanner.tanner155(), 0.3, 5000)):
        E = (np.random.default_rng(0).random((N, H.n)) < eps).astype(np.uint8)
        cases.append((f"peel {name} x{N}", H, lambda impl, H=H, E=E: impl.peel_batch(*H.csr, H.n, H.m, E)))
    for name, H, size, bit in (("golay23", tanner.golay23(), 4, -1),
                               ("regular(3,6,30)", tanner.regular(3, 6, 30, 1), 6, -1),
                               ("tanner155 bit 0", tanner.tanner155(), 4, 0)):
        cases.append((f"enum {name} size {size}", H,
                      lambda impl, H=H, s=size, b=bit: impl.enumerate_size(*H.csr, H.n, H.m, s, b, 0, 0)))

    print(f"{'case':40s}" + "".join(f"{b:>12s}" for b, _ in backends) + "   speedup")
    for label, H, fn in cases:
        times, outs = [], []
        for _, impl in backends:
            t, out = timed(lambda: fn(impl), args.repeat)
            times.append(t)
            outs.append(out)
        if len(outs) == 2:
            a, b = outs
            same = np.array_equal(np.asarray(a), np.asarray(b))
            assert same, f"backends disagree on {label}"
        speed = f"{times[0] / times[-1]:8.1f}x" if len(times) == 2 else ""
        print(f"{label:40s}" + "".join(f"{t:11.4f}s" for t in times) + f"   {speed}")


if __name__ == "__main__":
    main()
