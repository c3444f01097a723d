"""Frame-level features: built-in MFCC and the ESF1 interchange format.

ESF1 is the byte-exact boundary to external deep-feature extractors, so the
whole pipeline can consume encoder hidden states without any ML runtime in
this package. Layout (little-endian):

    bytes 0..3   magic "ESF1"
    byte  4      version (1)
    bytes 5..8   u32 dim
    bytes 9..12  u32 n_frames
    bytes 13..20 f64 frame_hop_s
    bytes 21..28 f64 first_center_s
    bytes 29..36 reserved (zero on write, ignored on read)
    bytes 37..   n_frames * dim float32 values, frame-major

Frames are assigned to segments by frame-center containment in the half-open
interval [start_s, end_s), which partitions frames across a SegmentSet with
no double counting.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.fft import dct

from .audio_io import AudioBuffer
from .errors import ConfigError, FormatError, ValidationError
from .segmenter import Segment

ESF1_MAGIC = b"ESF1"
ESF1_VERSION = 1
_HEADER = struct.Struct("<4sBIIdd")  # 29 bytes, followed by 8 reserved bytes
_RESERVED = 8

MFCC_SAMPLE_RATE = 16000
LOG_FLOOR = 1e-10


@dataclass
class FeatureMatrix:
    """n_frames x dim feature rows with uniform frame timing.

    Frame i is centered at first_center_s + i * frame_hop_s.
    """

    frames: np.ndarray
    frame_hop_s: float
    first_center_s: float

    def __post_init__(self) -> None:
        self.frames = np.asarray(self.frames)
        if self.frames.ndim != 2:
            raise ValidationError(f"frames must be 2-D, got shape {self.frames.shape}")
        if self.frames.shape[1] < 1:
            raise ValidationError("feature dim must be >= 1")
        if self.frame_hop_s <= 0:
            raise ValidationError(f"frame_hop_s must be positive, got {self.frame_hop_s}")
        if self.first_center_s < 0:
            raise ValidationError(f"first_center_s must be >= 0, got {self.first_center_s}")
        if self.frames.size and not np.all(np.isfinite(self.frames)):
            bad = int(np.flatnonzero(~np.isfinite(self.frames).ravel())[0])
            raise ValidationError(f"non-finite feature value at flat index {bad}")

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def dim(self) -> int:
        return self.frames.shape[1]

    def frame_centers(self) -> np.ndarray:
        return self.first_center_s + np.arange(self.n_frames) * self.frame_hop_s


def mfcc(
    buf: AudioBuffer,
    n_coeffs: int = 13,
    n_mels: int = 26,
    win_s: float = 0.025,
    hop_s: float = 0.010,
    preemphasis: float = 0.97,
) -> FeatureMatrix:
    """Mel-frequency cepstral coefficients of a 16 kHz mono buffer.

    Pre-emphasis, Hamming window, magnitude FFT at the next power of two,
    n_mels triangular mel filters spanning 0..Nyquist, log with floor 1e-10,
    orthonormal DCT-II keeping coefficients 0..n_coeffs-1. Too-short input
    yields an empty matrix rather than an error.
    """
    if buf.sample_rate_hz != MFCC_SAMPLE_RATE:
        raise ConfigError(
            f"mfcc expects {MFCC_SAMPLE_RATE} Hz input, got {buf.sample_rate_hz} Hz "
            "(resample first)"
        )
    win = int(round(win_s * buf.sample_rate_hz))
    hop = int(round(hop_s * buf.sample_rate_hz))
    x = buf.samples
    if len(x) < win:
        return FeatureMatrix(np.zeros((0, n_coeffs), dtype=np.float64), hop_s, win_s / 2.0)

    emphasized = np.empty_like(x)
    emphasized[0] = x[0]
    emphasized[1:] = x[1:] - preemphasis * x[:-1]

    n_frames = (len(x) - win) // hop + 1
    idx = np.arange(win)[None, :] + hop * np.arange(n_frames)[:, None]
    frames = emphasized[idx] * np.hamming(win)[None, :]

    n_fft = 1
    while n_fft < win:
        n_fft *= 2
    magnitude = np.abs(np.fft.rfft(frames, n_fft, axis=1))

    fbank = mel_filterbank(n_mels, n_fft, buf.sample_rate_hz)
    filter_energy = magnitude @ fbank.T
    log_energy = np.log(np.maximum(filter_energy, LOG_FLOOR))
    coeffs = dct(log_energy, type=2, axis=1, norm="ortho")[:, :n_coeffs]
    return FeatureMatrix(coeffs, hop_s, win_s / 2.0)


def mel_filterbank(n_mels: int, n_fft: int, sample_rate_hz: int) -> np.ndarray:
    """Triangular mel filters evaluated at FFT bin frequencies.

    Returns an (n_mels, n_fft // 2 + 1) weight matrix. Filter m rises from
    mel edge m to m+1 and falls to m+2, with edges equally spaced on the
    mel scale between 0 Hz and Nyquist.
    """
    nyquist = sample_rate_hz / 2.0
    mel_edges = np.linspace(0.0, _hz_to_mel(nyquist), n_mels + 2)
    hz_edges = _mel_to_hz(mel_edges)
    bin_freqs = np.arange(n_fft // 2 + 1) * (sample_rate_hz / n_fft)

    fbank = np.zeros((n_mels, bin_freqs.size))
    for m in range(n_mels):
        left, center, right = hz_edges[m], hz_edges[m + 1], hz_edges[m + 2]
        rise = (bin_freqs - left) / (center - left)
        fall = (right - bin_freqs) / (right - center)
        fbank[m] = np.maximum(0.0, np.minimum(rise, fall))
    return fbank


def _hz_to_mel(hz):
    return 2595.0 * np.log10(1.0 + np.asarray(hz) / 700.0)


def _mel_to_hz(mel):
    return 700.0 * (10.0 ** (np.asarray(mel) / 2595.0) - 1.0)


def store_features(fm: FeatureMatrix, path: str | Path) -> None:
    """Serialize to ESF1. Values are stored as float32; a float64 matrix is
    rounded once here, so store -> load -> store is byte-stable."""
    header = _HEADER.pack(
        ESF1_MAGIC, ESF1_VERSION, fm.dim, fm.n_frames, fm.frame_hop_s, fm.first_center_s
    )
    payload = np.ascontiguousarray(fm.frames, dtype="<f4").tobytes()
    Path(path).write_bytes(header + b"\x00" * _RESERVED + payload)


def load_features(path: str | Path) -> FeatureMatrix:
    """Load an ESF1 file, validating magic, sizes and finiteness."""
    data = Path(path).read_bytes()
    if len(data) < 4 or data[:4] != ESF1_MAGIC:
        raise FormatError(f"{path}: bad magic, not an ESF1 file")
    if len(data) < _HEADER.size + _RESERVED:
        raise FormatError(f"{path}: header truncated ({len(data)} bytes)")
    _magic, version, dim, n_frames, hop_s, first_center_s = _HEADER.unpack_from(data)
    if version != ESF1_VERSION:
        raise FormatError(f"{path}: unsupported ESF1 version {version}")
    expected = n_frames * dim * 4
    payload = data[_HEADER.size + _RESERVED :]
    if len(payload) != expected:
        raise FormatError(
            f"{path}: payload is {len(payload)} bytes, expected {expected} "
            f"({n_frames} frames x {dim} dims x 4)"
        )
    frames = np.frombuffer(payload, dtype="<f4").reshape(n_frames, dim)
    if frames.size and not np.all(np.isfinite(frames)):
        bad = int(np.flatnonzero(~np.isfinite(frames).ravel())[0])
        raise ValidationError(f"{path}: non-finite value at flat index {bad}")
    return FeatureMatrix(frames.copy(), hop_s, first_center_s)


def slice_frames(fm: FeatureMatrix, seg: Segment) -> FeatureMatrix:
    """Rows whose frame centers lie in [seg.start_s, seg.end_s)."""
    centers = fm.frame_centers()
    mask = (centers >= seg.start_s) & (centers < seg.end_s)
    picked = np.flatnonzero(mask)
    if picked.size == 0:
        return FeatureMatrix(
            np.zeros((0, fm.dim), dtype=fm.frames.dtype), fm.frame_hop_s, fm.first_center_s
        )
    first = int(picked[0])
    return FeatureMatrix(
        fm.frames[first : int(picked[-1]) + 1].copy(),
        fm.frame_hop_s,
        float(centers[first]),
    )
