"""Minimal WAV loading for the exporter: integer PCM via the stdlib reader,
mono downmix, linear resampling to the encoder rate."""

from __future__ import annotations

import wave
from pathlib import Path

import numpy as np

ENCODER_RATE = 16000


def load_mono_16k(path: str | Path) -> np.ndarray:
    """Read a PCM WAV as float32 mono at 16 kHz."""
    with wave.open(str(path), "rb") as w:
        channels = w.getnchannels()
        width = w.getsampwidth()
        rate = w.getframerate()
        raw = w.readframes(w.getnframes())

    if width == 2:
        samples = np.frombuffer(raw, dtype="<i2").astype(np.float32) / 32768.0
    elif width == 4:
        samples = np.frombuffer(raw, dtype="<i4").astype(np.float32) / 2147483648.0
    elif width == 3:
        b = np.frombuffer(raw, dtype=np.uint8).reshape(-1, 3).astype(np.int32)
        val = b[:, 0] | (b[:, 1] << 8) | (b[:, 2] << 16)
        val = np.where(val >= 1 << 23, val - (1 << 24), val)
        samples = val.astype(np.float32) / float(1 << 23)
    else:
        raise ValueError(f"{path}: unsupported sample width {width * 8} bits")

    if channels > 1:
        samples = samples[: len(samples) - len(samples) % channels]
        samples = samples.reshape(-1, channels).mean(axis=1)

    if rate != ENCODER_RATE and len(samples):
        n_out = int(round(len(samples) * ENCODER_RATE / rate))
        positions = np.arange(n_out) * (rate / ENCODER_RATE)
        samples = np.interp(positions, np.arange(len(samples)), samples)
    return np.ascontiguousarray(samples, dtype=np.float32)
