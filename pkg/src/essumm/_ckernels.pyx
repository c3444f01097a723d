# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled nearest-centroid kernel (hot loop of k-means and quantization)."""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY

cnp.import_array()

BACKEND = "cython"


def assign_labels(double[:, ::1] points, double[:, ::1] centroids):
    """Assign every point to its nearest centroid.

    Returns (labels, sqdist): int64 centroid indices and the squared
    Euclidean distance of each point to its assigned centroid. Ties go to
    the lowest centroid index (strict < while scanning in index order).
    """
    cdef Py_ssize_t n = points.shape[0]
    cdef Py_ssize_t dim = points.shape[1]
    cdef Py_ssize_t k = centroids.shape[0]

    labels_arr = np.empty(n, dtype=np.int64)
    sqdist_arr = np.empty(n, dtype=np.float64)
    cdef long long[::1] labels = labels_arr
    cdef double[::1] sqdist = sqdist_arr

    cdef Py_ssize_t i, j, t, best_j
    cdef double best, d2, diff

    for i in range(n):
        best = INFINITY
        best_j = 0
        for j in range(k):
            d2 = 0.0
            for t in range(dim):
                diff = points[i, t] - centroids[j, t]
                d2 += diff * diff
            if d2 < best:
                best = d2
                best_j = j
        labels[i] = best_j
        sqdist[i] = best
    return labels_arr, sqdist_arr
