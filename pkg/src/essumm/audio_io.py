"""WAV reading/writing and sample-rate conversion.

Everything downstream works on mono float samples in [-1, 1]. The reader is
a small RIFF parser rather than the stdlib ``wave`` module because we accept
IEEE-float payloads, which ``wave`` rejects. Output is always 16-bit PCM.
"""

from __future__ import annotations

import struct
import wave
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError, FormatError, ValidationError

# wFormatTag values we can name in diagnostics
_FORMAT_NAMES = {
    0x0001: "pcm_int",
    0x0003: "ieee_float",
    0x0006: "alaw",
    0x0007: "mulaw",
    0x0011: "ima_adpcm",
    0x0031: "gsm610",
    0x0055: "mpeg_layer3",
    0xFFFE: "extensible",
}

_WAVE_FORMAT_PCM = 0x0001
_WAVE_FORMAT_IEEE_FLOAT = 0x0003
_WAVE_FORMAT_EXTENSIBLE = 0xFFFE


@dataclass
class AudioBuffer:
    """Mono PCM signal: float64 samples (nominal range [-1, 1]) plus rate."""

    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self) -> None:
        if self.sample_rate_hz <= 0:
            raise ConfigError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise ValidationError(f"samples must be 1-D, got shape {self.samples.shape}")
        if self.samples.size and not np.all(np.isfinite(self.samples)):
            bad = int(np.flatnonzero(~np.isfinite(self.samples))[0])
            raise ValidationError(f"non-finite sample at index {bad}")

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz

    def __len__(self) -> int:
        return len(self.samples)


def read_wav(path: str | Path) -> AudioBuffer:
    """Read a RIFF/WAVE file into a mono AudioBuffer.

    Accepts 16/24-bit integer PCM and 32-bit float PCM, 1 or 2 channels.
    Stereo is downmixed by the arithmetic mean of the channels; integer
    samples are scaled to [-1, 1) by 2^(bits-1).
    """
    data = Path(path).read_bytes()
    if len(data) < 12:
        raise FormatError(f"{path}: file too short for a RIFF header (offset 0)")
    if data[0:4] != b"RIFF":
        raise FormatError(f"{path}: not a RIFF file (offset 0)")
    if data[8:12] != b"WAVE":
        raise FormatError(f"{path}: missing WAVE form type (offset 8)")

    fmt = None
    payload = None
    offset = 12
    while offset + 8 <= len(data):
        chunk_id = data[offset : offset + 4]
        (chunk_size,) = struct.unpack_from("<I", data, offset + 4)
        body_start = offset + 8
        if body_start + chunk_size > len(data):
            raise FormatError(
                f"{path}: chunk {chunk_id!r} of size {chunk_size} truncated (offset {offset})"
            )
        if chunk_id == b"fmt ":
            fmt = _parse_fmt(path, data, body_start, chunk_size)
        elif chunk_id == b"data":
            payload = data[body_start : body_start + chunk_size]
        # chunks are word-aligned: odd sizes carry a pad byte
        offset = body_start + chunk_size + (chunk_size & 1)

    if fmt is None:
        raise FormatError(f"{path}: no fmt chunk found (offset {len(data)})")
    if payload is None:
        raise FormatError(f"{path}: no data chunk found (offset {len(data)})")

    format_tag, channels, rate, bits = fmt
    if channels not in (1, 2):
        raise FormatError(f"{path}: unsupported channel count {channels} (mono/stereo only)")

    if format_tag == _WAVE_FORMAT_PCM and bits == 16:
        raw = np.frombuffer(payload[: len(payload) - len(payload) % 2], dtype="<i2")
        samples = raw.astype(np.float64) / 32768.0
    elif format_tag == _WAVE_FORMAT_PCM and bits == 24:
        usable = len(payload) - len(payload) % 3
        b = np.frombuffer(payload[:usable], dtype=np.uint8).reshape(-1, 3).astype(np.int32)
        raw = b[:, 0] | (b[:, 1] << 8) | (b[:, 2] << 16)
        raw = np.where(raw >= 1 << 23, raw - (1 << 24), raw)
        samples = raw.astype(np.float64) / float(1 << 23)
    elif format_tag == _WAVE_FORMAT_IEEE_FLOAT and bits == 32:
        raw = np.frombuffer(payload[: len(payload) - len(payload) % 4], dtype="<f4")
        samples = raw.astype(np.float64)
    else:
        name = _FORMAT_NAMES.get(format_tag, f"0x{format_tag:04x}")
        raise FormatError(
            f"{path}: unsupported codec {name} at {bits}-bit "
            "(supported: pcm_int 16/24-bit, ieee_float 32-bit)"
        )

    if channels == 2:
        samples = samples[: len(samples) - len(samples) % 2].reshape(-1, 2).mean(axis=1)
    return AudioBuffer(samples=samples, sample_rate_hz=rate)


def _parse_fmt(path, data: bytes, start: int, size: int) -> tuple[int, int, int, int]:
    if size < 16:
        raise FormatError(f"{path}: fmt chunk too short, {size} bytes (offset {start - 8})")
    format_tag, channels, rate, _byte_rate, _block_align, bits = struct.unpack_from(
        "<HHIIHH", data, start
    )
    if format_tag == _WAVE_FORMAT_EXTENSIBLE:
        # SubFormat GUID begins with the equivalent plain format tag
        if size < 40:
            raise FormatError(f"{path}: extensible fmt chunk too short (offset {start - 8})")
        (format_tag,) = struct.unpack_from("<H", data, start + 24)
    return format_tag, channels, rate, bits


def resample(buf: AudioBuffer, target_hz: int) -> AudioBuffer:
    """Linear-interpolation resampling to target_hz.

    Output length is round(len * target / source). Same-rate calls return
    the input unchanged. Linear interpolation is lossy above ~target/2
    content; adequate for energy VAD and MFCC at this scale.
    """
    if target_hz <= 0:
        raise ConfigError(f"target_hz must be positive, got {target_hz}")
    if target_hz == buf.sample_rate_hz:
        return buf
    n_in = len(buf.samples)
    src = buf.sample_rate_hz
    # round(n_in * target / src) half-up, in exact integer arithmetic
    n_out = (2 * n_in * target_hz + src) // (2 * src)
    if n_in == 0 or n_out == 0:
        return AudioBuffer(np.zeros(0), target_hz)
    positions = np.arange(n_out, dtype=np.float64) * (src / target_hz)
    out = np.interp(positions, np.arange(n_in, dtype=np.float64), buf.samples)
    return AudioBuffer(out, target_hz)


def write_wav(buf: AudioBuffer, path: str | Path) -> None:
    """Write 16-bit PCM mono WAV.

    Samples are clamped to [-1, 1], scaled by 32767 and rounded
    half-away-from-zero, so an amplitude of -1.0 stores -32767.
    """
    x = np.clip(buf.samples, -1.0, 1.0) * 32767.0
    pcm = (np.sign(x) * np.floor(np.abs(x) + 0.5)).astype(np.int16)
    with wave.open(str(path), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(buf.sample_rate_hz)
        w.writeframes(pcm.tobytes())
