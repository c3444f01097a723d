#!/usr/bin/env python3
"""Benchmark the compiled nearest-centroid kernel against the numpy fallback.

The assignment step dominates k-means runtime (O(n*k*d) per Lloyd iteration
versus O(n*d) for the centroid update), so this is the loop that decides
whether an hour-long recording clusters in seconds or minutes.
"""

import time

import numpy as np

from essumm import _kernels_np

try:
    from essumm import _ckernels
except ImportError:
    _ckernels = None


def bench(impl, points, centroids, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        impl.assign_labels(points, centroids)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    rng = np.random.default_rng(0)
    print(f"{'n':>8} {'dim':>5} {'k':>4} {'numpy':>10} {'cython':>10} {'speedup':>8}")
    for n, dim, k in [
        (20_000, 13, 32),
        (100_000, 13, 32),
        (360_000, 13, 32),   # ~1 h of audio at a 10 ms hop
        (100_000, 64, 32),
        (50_000, 768, 32),   # deep-feature dimensionality
    ]:
        points = np.ascontiguousarray(rng.normal(size=(n, dim)))
        centroids = np.ascontiguousarray(rng.normal(size=(k, dim)))
        t_np = bench(_kernels_np, points, centroids)
        if _ckernels is None:
            print(f"{n:>8} {dim:>5} {k:>4} {t_np:>9.3f}s {'n/a':>10} {'n/a':>8}")
            continue
        t_cy = bench(_ckernels, points, centroids)
        la, _ = _kernels_np.assign_labels(points, centroids)
        lb, _ = _ckernels.assign_labels(points, centroids)
        agree = "" if np.array_equal(la, lb) else "  (label mismatch!)"
        print(
            f"{n:>8} {dim:>5} {k:>4} {t_np:>9.3f}s {t_cy:>9.3f}s {t_np / t_cy:>7.2f}x{agree}"
        )


if __name__ == "__main__":
    main()
