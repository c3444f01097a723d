"""Dump frame-level hidden states of a pretrained speech encoder to ESF1.

Long recordings are processed in overlapping chunks whose starts are aligned
to the encoder's frame stride, and frames are stitched by center-cropping:
each chunk only contributes the frames whose receptive fields start inside
its core region, so the total frame count equals what one full-signal pass
would produce. Inference is forced single-threaded and gradient-free so
repeated runs emit byte-identical files.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .audio import ENCODER_RATE, load_mono_16k
from .esf1 import write_esf1

log = logging.getLogger("essumm_sidecar.export")

DEFAULT_CHUNK_S = 30.0
OVERLAP_S = 2.0


class ExportError(Exception):
    pass


@dataclass
class EncoderGeometry:
    """Frame timing derived from the encoder's conv front-end."""

    hop_samples: int
    receptive_field: int

    @property
    def frame_hop_s(self) -> float:
        return self.hop_samples / ENCODER_RATE

    @property
    def first_center_s(self) -> float:
        return self.receptive_field / 2.0 / ENCODER_RATE

    def n_frames(self, n_samples: int) -> int:
        if n_samples < self.receptive_field:
            return 0
        return (n_samples - self.receptive_field) // self.hop_samples + 1


def geometry_from_config(config) -> EncoderGeometry:
    hop = 1
    for s in config.conv_stride:
        hop *= int(s)
    rf = 1
    for kernel, stride in zip(reversed(config.conv_kernel), reversed(config.conv_stride)):
        rf = (rf - 1) * int(stride) + int(kernel)
    return EncoderGeometry(hop_samples=hop, receptive_field=rf)


def load_encoder(model_id: str):
    """Load a pretrained encoder from a local path or a hub identifier."""
    import torch
    from transformers import Wav2Vec2Model

    try:
        model = Wav2Vec2Model.from_pretrained(model_id)
    except Exception as exc:
        raise ExportError(
            f"could not load encoder {model_id!r}: {exc}; pass a local directory "
            "containing config.json + weights, or download the model first"
        ) from exc
    model.eval()
    torch.set_num_threads(1)  # bit-stable reductions across runs
    return model


def export_features(
    input_wav: str | Path,
    out_esf1: str | Path,
    model_id: str,
    layer: int | None = None,
    chunk_s: float = DEFAULT_CHUNK_S,
    normalize: bool = True,
) -> dict:
    """Run the encoder over the recording and write the chosen layer's
    hidden states as ESF1. Returns a small stats dict for logging/tests."""
    import torch

    samples = load_mono_16k(input_wav)
    model = load_encoder(model_id)
    geometry = geometry_from_config(model.config)
    n_layers = int(model.config.num_hidden_layers)

    if layer is None:
        layer = n_layers // 2  # mid-depth default
    if not 0 <= layer <= n_layers:
        raise ExportError(
            f"layer must be in [0, {n_layers}] (0 = conv features, "
            f"i = after transformer block i), got {layer}"
        )

    if normalize and len(samples):
        std = float(samples.std())
        samples = (samples - float(samples.mean())) / (std if std > 1e-8 else 1.0)

    expected = geometry.n_frames(len(samples))
    dim = int(model.config.hidden_size)
    if expected == 0:
        log.warning("input shorter than the encoder receptive field; empty output")
        write_esf1(out_esf1, np.zeros((0, dim), dtype=np.float32),
                   geometry.frame_hop_s, geometry.first_center_s)
        return {"n_frames": 0, "dim": dim, "layer": layer}

    hop = geometry.hop_samples
    core_len = max(hop, int(chunk_s * ENCODER_RATE) // hop * hop)
    overlap = max(geometry.receptive_field, int(OVERLAP_S * ENCODER_RATE)) // hop * hop

    pieces: list[np.ndarray] = []
    emitted = 0
    with torch.no_grad():
        for core_start in range(0, len(samples), core_len):
            core_end = min(core_start + core_len, len(samples))
            lo = max(0, core_start - overlap)
            hi = min(len(samples), core_end + overlap)
            if hi - lo < geometry.receptive_field:
                continue  # tail too short for any frame
            chunk = torch.from_numpy(samples[lo:hi])[None, :]
            try:
                states = model(chunk, output_hidden_states=True).hidden_states[layer]
            except RuntimeError as exc:
                if "out of memory" in str(exc).lower():
                    raise ExportError(
                        f"encoder ran out of memory on a {hi - lo} sample chunk; "
                        "re-run with a smaller --chunk-s"
                    ) from exc
                raise
            frames = states[0].numpy()
            # local frame j starts at global sample lo + j*hop; keep frames
            # whose start lies in this core
            first_keep = max(0, math.ceil((core_start - lo) / hop))
            kept = []
            for j in range(first_keep, frames.shape[0]):
                start = lo + j * hop
                if start >= core_end:
                    break
                kept.append(j)
            if kept:
                pieces.append(frames[kept[0] : kept[-1] + 1])
                emitted += len(kept)
            if emitted >= expected:
                break

    stacked = np.concatenate(pieces, axis=0) if pieces else np.zeros((0, dim), np.float32)
    if stacked.shape[0] != expected:
        raise ExportError(
            f"stitching produced {stacked.shape[0]} frames, expected {expected}"
        )
    write_esf1(out_esf1, stacked, geometry.frame_hop_s, geometry.first_center_s)
    return {"n_frames": expected, "dim": dim, "layer": layer}
