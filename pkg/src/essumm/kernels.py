"""Backend selection for the nearest-centroid kernel.

The compiled Cython extension is preferred; the numpy implementation is the
fallback. Set ESSUMM_PURE_PYTHON=1 to force the fallback (used by the
benchmark and the backend-agreement tests). Both backends use squared
Euclidean distance with ties broken toward the lowest centroid index, but
floating-point summation order differs between them, so near-ties may resolve
differently at the last ulp; determinism is guaranteed per backend.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_np

if os.environ.get("ESSUMM_PURE_PYTHON"):
    _impl = _kernels_np
else:
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        _impl = _kernels_np

BACKEND: str = _impl.BACKEND


def assign_labels(points: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Nearest-centroid assignment; see the backend modules for the contract."""
    points = np.ascontiguousarray(points, dtype=np.float64)
    centroids = np.ascontiguousarray(centroids, dtype=np.float64)
    if points.shape[1] != centroids.shape[1]:
        raise ValueError(
            f"dimension mismatch: points have dim {points.shape[1]}, "
            f"centroids have dim {centroids.shape[1]}"
        )
    return _impl.assign_labels(points, centroids)
