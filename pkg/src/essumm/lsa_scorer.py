"""Segment salience scoring in the latent subspace of the recording.

Each segment becomes a TF-IDF vector over cluster IDs (TF per segment, IDF
over all segments of the recording). PCA of the centered segment matrix
gives the recording's principal subspace; a segment's salience is the
Euclidean norm of its centered vector's residual orthogonal to that
subspace, mapped to a score by 1 / (1 + distance). Only the ranking matters
downstream, and the ranking is invariant to uniform scaling of the vectors.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, ValidationError
from .quantizer import ClusterSequence
from .segmenter import Segment, SegmentSet

_JACOBI_TOL = 1e-12  # off-diagonal Frobenius norm
_JACOBI_MAX_SWEEPS = 100


@dataclass
class TfIdfVector:
    """Non-negative weights, one per cluster ID."""

    weights: np.ndarray

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.ndim != 1:
            raise ValidationError("TF-IDF weights must be a vector")
        if self.weights.size and (
            not np.all(np.isfinite(self.weights)) or self.weights.min() < 0
        ):
            raise ValidationError("TF-IDF weights must be finite and >= 0")


@dataclass
class LsaModel:
    """Column means, orthonormal principal components and their eigenvalues."""

    mean: np.ndarray
    components: np.ndarray  # n_comp x k, orthonormal rows
    eigenvalues: np.ndarray  # descending

    @property
    def n_comp(self) -> int:
        return self.components.shape[0]


@dataclass
class ScoredSegment:
    segment: Segment
    distance: float  # Euclidean residual to the principal subspace
    score: float  # 1 / (1 + distance), in (0, 1]


def tfidf(sequences: list[ClusterSequence], k: int) -> list[TfIdfVector]:
    """TF-IDF vectors over cluster IDs.

    tf(t, s) = count(t in s) / len(s) (zero for an empty segment),
    idf(t) = ln((1 + N) / (1 + df(t))) + 1 with df counted over segments.
    """
    n_docs = len(sequences)
    if n_docs < 1:
        raise ConfigError("tfidf needs at least one segment")
    counts = np.zeros((n_docs, k), dtype=np.float64)
    for i, seq in enumerate(sequences):
        if len(seq) == 0:
            continue
        ids = seq.ids
        if ids.min() < 0 or ids.max() >= k:
            raise ValidationError(f"segment {i} has cluster id outside [0, {k})")
        counts[i] = np.bincount(ids, minlength=k)

    lengths = counts.sum(axis=1)
    tf = np.divide(counts, lengths[:, None], out=np.zeros_like(counts), where=lengths[:, None] > 0)
    df = (counts > 0).sum(axis=0)
    idf = np.log((1.0 + n_docs) / (1.0 + df)) + 1.0
    return [TfIdfVector(row) for row in tf * idf[None, :]]


def _as_matrix(vectors) -> np.ndarray:
    """Rows from TfIdfVector items or plain array-likes (PCA itself has no
    non-negativity requirement)."""
    return np.array(
        [np.asarray(getattr(v, "weights", v), dtype=np.float64) for v in vectors]
    )


def fit_pca(vectors: list[TfIdfVector], n_comp: int) -> LsaModel:
    """PCA of the segment matrix via cyclic Jacobi rotations.

    Centers by column mean, forms the 1/(N-1) covariance, and keeps the top
    n_comp eigenpairs. The covariance is at most k x k (k is the codebook
    size, 32 by default), where Jacobi is exact, deterministic and cheap.
    Each component's largest-magnitude entry is made positive so serialized
    models are reproducible; distances are sign-invariant anyway.
    """
    x = _as_matrix(vectors)
    n, dim = x.shape
    if n < 2:
        raise ConfigError(f"PCA needs at least 2 segments, got {n}")
    if not 1 <= n_comp <= min(n - 1, dim):
        raise ConfigError(
            f"n_comp must be in [1, min(N-1, k)] = [1, {min(n - 1, dim)}], got {n_comp}"
        )

    mean = x.mean(axis=0)
    centered = x - mean
    cov = centered.T @ centered / (n - 1)
    eigenvalues, eigenvectors = jacobi_eigh(cov)

    order = np.argsort(-eigenvalues, kind="stable")[:n_comp]
    comps = eigenvectors[:, order].T.copy()
    for row in comps:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    return LsaModel(mean=mean, components=comps, eigenvalues=eigenvalues[order].copy())


def jacobi_eigh(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix by cyclic Jacobi sweeps.

    Sweeps rotate away each off-diagonal pair (p, q) in turn until the
    off-diagonal Frobenius norm falls below 1e-12 or 100 sweeps pass.
    Returns (eigenvalues, eigenvectors) with eigenvectors in columns.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    m = a.copy()
    v = np.eye(n)
    for _ in range(_JACOBI_MAX_SWEEPS):
        off = math.sqrt(max(0.0, (m * m).sum() - (np.diag(m) ** 2).sum()))
        if off <= _JACOBI_TOL:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                if apq == 0.0:
                    continue
                diff = m[q, q] - m[p, p]
                if abs(apq) < 1e-250 * abs(diff):
                    # rotation angle below float resolution; entry is noise
                    m[p, q] = m[q, p] = 0.0
                    continue
                theta = diff / (2.0 * apq)
                if abs(theta) > 1e150:  # theta^2 would overflow; same limit
                    t = 1.0 / (2.0 * theta)
                else:
                    t = math.copysign(1.0, theta) / (
                        abs(theta) + math.sqrt(theta * theta + 1.0)
                    )
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                rot_p = c * m[:, p] - s * m[:, q]
                rot_q = s * m[:, p] + c * m[:, q]
                m[:, p], m[:, q] = rot_p, rot_q
                rot_p = c * m[p, :] - s * m[q, :]
                rot_q = s * m[p, :] + c * m[q, :]
                m[p, :], m[q, :] = rot_p, rot_q
                rot_p = c * v[:, p] - s * v[:, q]
                rot_q = s * v[:, p] + c * v[:, q]
                v[:, p], v[:, q] = rot_p, rot_q
    return np.diag(m).copy(), v


def score_segments(
    vectors: list[TfIdfVector], model: LsaModel, segments: SegmentSet
) -> list[ScoredSegment]:
    """Residual distance of each segment to the principal subspace.

    distance_i = ||(x_i - mean) - P^T P (x_i - mean)||_2 with P the component
    rows; score_i = 1 / (1 + distance_i). Output order matches input order.
    """
    if len(vectors) != len(segments):
        raise ConfigError(
            f"{len(vectors)} vectors vs {len(segments)} segments"
        )
    x = _as_matrix(vectors)
    if x.shape[1] != model.mean.shape[0]:
        raise ConfigError(
            f"vector length {x.shape[1]} does not match model dimension {model.mean.shape[0]}"
        )
    centered = x - model.mean
    projected = centered @ model.components.T @ model.components
    distances = np.linalg.norm(centered - projected, axis=1)
    return [
        ScoredSegment(segment=seg, distance=float(d), score=1.0 / (1.0 + float(d)))
        for seg, d in zip(segments, distances)
    ]


def dump_model(model: LsaModel, path: str | Path) -> None:
    """Debug dump; not consumed by any pipeline stage."""
    doc = {
        "mean": model.mean.tolist(),
        "eigenvalues": model.eigenvalues.tolist(),
        "components": model.components.tolist(),
    }
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")
