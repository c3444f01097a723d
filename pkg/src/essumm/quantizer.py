"""Pseudo-phoneme vector quantization: a k-means codebook over all frames of
the recording, and per-segment cluster ID sequences.

The codebook is fit per recording on every frame (in-segment or not) so that
quantization and the downstream document statistics share one vocabulary.
Nearest-centroid ties always resolve to the lowest centroid index, and all
randomness flows from the explicit seed, so a given (frames, k, seed) yields
an identical codebook on every run.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .errors import ConfigError, ValidationError
from .features import FeatureMatrix


@dataclass
class Codebook:
    """k-means centroids plus the training inertia that produced them."""

    centroids: np.ndarray
    k: int
    inertia: float
    seed: int
    # inertia after each Lloyd assignment, for convergence diagnostics
    inertia_trace: list[float] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.centroids = np.asarray(self.centroids, dtype=np.float64)
        if self.k < 1 or self.centroids.shape[0] != self.k:
            raise ValidationError(f"codebook k={self.k} does not match centroid count")
        if not np.all(np.isfinite(self.centroids)):
            raise ValidationError("codebook contains non-finite centroids")
        if self.inertia < 0:
            raise ValidationError(f"inertia must be >= 0, got {self.inertia}")

    @property
    def dim(self) -> int:
        return self.centroids.shape[1]


@dataclass
class ClusterSequence:
    """Per-frame centroid IDs for one segment slice."""

    ids: np.ndarray

    def __post_init__(self) -> None:
        self.ids = np.asarray(self.ids, dtype=np.int64)

    def __len__(self) -> int:
        return len(self.ids)


def fit_kmeans(
    frames: FeatureMatrix,
    k: int = 32,
    seed: int = 0,
    max_iters: int = 300,
    rel_tol: float = 1e-6,
) -> Codebook:
    """Fit a k-means codebook with k-means++ initialization.

    Lloyd iterations run until the relative inertia improvement drops below
    rel_tol or max_iters is reached. A cluster emptied by an update is
    re-seeded to the frame currently farthest from its assigned centroid.
    The returned inertia is always consistent with a fresh assignment
    against the returned centroids.
    """
    x = np.ascontiguousarray(frames.frames, dtype=np.float64)
    n = x.shape[0]
    if k < 1:
        raise ConfigError(f"k must be >= 1, got {k}")
    if n < k:
        raise ConfigError(f"need at least k={k} frames to fit a codebook, got {n}")

    rng = np.random.default_rng(seed)
    centroids = _kmeans_pp_init(x, k, rng)

    labels, sqdist = kernels.assign_labels(x, centroids)
    inertia = float(sqdist.sum())
    trace = [inertia]
    for _ in range(max_iters):
        centroids = _update_centroids(x, labels, sqdist, centroids, k)
        labels, sqdist = kernels.assign_labels(x, centroids)
        new_inertia = float(sqdist.sum())
        trace.append(new_inertia)
        if inertia - new_inertia <= rel_tol * inertia:
            inertia = new_inertia
            break
        inertia = new_inertia

    return Codebook(centroids, k, inertia, seed, inertia_trace=trace)


def _kmeans_pp_init(x: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Classic D^2-weighted seeding. Falls back to a uniform draw when every
    remaining point coincides with a chosen centroid."""
    n = x.shape[0]
    centroids = np.empty((k, x.shape[1]), dtype=np.float64)
    first = int(rng.integers(n))
    centroids[0] = x[first]
    if k == 1:
        return centroids
    sqdist = ((x - centroids[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = float(sqdist.sum())
        if total > 0.0:
            cut = rng.random() * total
            idx = int(np.searchsorted(np.cumsum(sqdist), cut, side="right"))
            idx = min(idx, n - 1)
        else:
            idx = int(rng.integers(n))
        centroids[j] = x[idx]
        sqdist = np.minimum(sqdist, ((x - centroids[j]) ** 2).sum(axis=1))
    return centroids


def _update_centroids(
    x: np.ndarray,
    labels: np.ndarray,
    sqdist: np.ndarray,
    centroids: np.ndarray,
    k: int,
) -> np.ndarray:
    counts = np.bincount(labels, minlength=k)
    nonempty = counts > 0
    # group rows by label once, then segment-sum: much faster than a scatter
    order = np.argsort(labels, kind="stable")
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    sums = np.add.reduceat(x[order], starts[nonempty], axis=0)

    updated = centroids.copy()
    updated[nonempty] = sums / counts[nonempty, None]

    empties = np.flatnonzero(~nonempty)
    if empties.size:
        # farthest-point re-seeding; each empty cluster takes the next
        # farthest frame so two empties never land on the same point
        claimable = sqdist.copy()
        for j in empties:
            far = int(np.argmax(claimable))
            updated[j] = x[far]
            claimable[far] = -1.0
    return updated


def quantize(fm: FeatureMatrix, cb: Codebook) -> ClusterSequence:
    """Map each frame to the nearest centroid (ties -> lowest index)."""
    if fm.dim != cb.dim:
        raise ConfigError(
            f"feature dim {fm.dim} does not match codebook dim {cb.dim}"
        )
    if fm.n_frames == 0:
        return ClusterSequence(np.zeros(0, dtype=np.int64))
    labels, _ = kernels.assign_labels(
        np.ascontiguousarray(fm.frames, dtype=np.float64), cb.centroids
    )
    return ClusterSequence(labels)


def dump_codebook(cb: Codebook, path: str | Path) -> None:
    """Debug dump; not consumed by any pipeline stage."""
    doc = {
        "k": cb.k,
        "dim": cb.dim,
        "seed": cb.seed,
        "inertia": cb.inertia,
        "centroids": cb.centroids.tolist(),
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
