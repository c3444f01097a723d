"""ESF1 writer: the byte format consumed by the summarizer's feature loader.

Little-endian layout: magic "ESF1", u8 version=1, u32 dim, u32 n_frames,
f64 frame_hop_s, f64 first_center_s, 8 reserved zero bytes, then
n_frames * dim float32 values, frame-major. This module intentionally has
no dependency on the summarizer package; the bytes are the contract.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"ESF1"
VERSION = 1
_HEADER = struct.Struct("<4sBIIdd")
_RESERVED = 8


def write_esf1(path: str | Path, frames: np.ndarray, frame_hop_s: float,
               first_center_s: float) -> None:
    frames = np.asarray(frames)
    if frames.ndim != 2:
        raise ValueError(f"frames must be 2-D, got shape {frames.shape}")
    if not np.all(np.isfinite(frames)):
        raise ValueError("refusing to write non-finite feature values")
    n_frames, dim = frames.shape
    header = _HEADER.pack(MAGIC, VERSION, dim, n_frames, frame_hop_s, first_center_s)
    payload = np.ascontiguousarray(frames, dtype="<f4").tobytes()
    Path(path).write_bytes(header + b"\x00" * _RESERVED + payload)
