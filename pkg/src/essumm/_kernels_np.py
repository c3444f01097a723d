"""Pure-numpy implementation of the nearest-centroid kernel.

This is the fallback used when the compiled extension is unavailable; both
backends implement the same contract: squared Euclidean distances, ties
resolved to the lowest centroid index.
"""

from __future__ import annotations

import numpy as np

BACKEND = "numpy"

# Rows of the chunked distance matrix; bounds peak memory at
# chunk * k * dim float64.
_CHUNK = 4096


def assign_labels(points: np.ndarray, centroids: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Assign every point to its nearest centroid.

    Returns (labels, sqdist): int64 centroid indices and the squared
    Euclidean distance of each point to its assigned centroid.
    """
    n = points.shape[0]
    labels = np.empty(n, dtype=np.int64)
    sqdist = np.empty(n, dtype=np.float64)
    for lo in range(0, n, _CHUNK):
        hi = min(lo + _CHUNK, n)
        diff = points[lo:hi, None, :] - centroids[None, :, :]
        d2 = np.einsum("ijk,ijk->ij", diff, diff)
        # argmin picks the first (lowest-index) centroid on exact ties
        lab = np.argmin(d2, axis=1)
        labels[lo:hi] = lab
        sqdist[lo:hi] = d2[np.arange(hi - lo), lab]
    return labels, sqdist
