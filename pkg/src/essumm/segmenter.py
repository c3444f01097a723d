"""Silence-gap segmentation and external segment-manifest ingestion.

The energy detector classifies 10 ms frames against an adaptive threshold
placed margin_db above the recording's own 5th-percentile frame level, so
segment boundaries are invariant to uniform gain. Recordings with no silence
at all therefore produce no segments: the threshold is relative by design.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .audio_io import AudioBuffer
from .errors import ConfigError, ValidationError

log = logging.getLogger("essumm.segmenter")

FRAME_S = 0.010
_RMS_FLOOR = 1e-12  # keeps dB finite on all-zero frames


@dataclass
class Segment:
    """A time span of the recording, in temporal order."""

    id: int
    start_s: float
    end_s: float

    def __post_init__(self) -> None:
        if self.end_s <= self.start_s:
            raise ValidationError(
                f"segment {self.id}: end_s {self.end_s} must exceed start_s {self.start_s}"
            )

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


@dataclass
class SegmentSet:
    segments: list[Segment] = field(default_factory=list)
    source: str = "silence_vad"  # or "external_manifest"

    def __post_init__(self) -> None:
        for i, seg in enumerate(self.segments):
            if seg.id != i:
                raise ValidationError(f"segment ids must be 0..n-1 in order, got {seg.id} at {i}")
            if i and seg.start_s < self.segments[i - 1].end_s:
                raise ValidationError(
                    f"segments {i - 1} and {i} overlap "
                    f"({self.segments[i - 1].end_s} > {seg.start_s})"
                )

    def __len__(self) -> int:
        return len(self.segments)

    def __iter__(self):
        return iter(self.segments)


def segment_by_silence(
    buf: AudioBuffer,
    min_silence_s: float = 0.5,
    min_segment_s: float = 0.2,
    margin_db: float = 10.0,
    pad_s: float = 0.05,
) -> SegmentSet:
    """Split the recording into segments separated by silence gaps.

    Silence runs shorter than min_silence_s are absorbed into speech, speech
    runs shorter than min_segment_s are dropped, and each kept run is padded
    by pad_s on both sides (padded runs that overlap are merged).
    """
    if len(buf) == 0:
        raise ConfigError("cannot segment an empty buffer")

    db = _frame_db(buf)
    if db.size == 0:
        return SegmentSet([], source="silence_vad")
    threshold = np.percentile(db, 5.0) + margin_db
    speech = db > threshold
    if not speech.any():
        return SegmentSet([], source="silence_vad")

    min_silence_frames = max(1, int(np.ceil(min_silence_s / FRAME_S - 1e-9)))
    min_segment_frames = max(1, int(np.ceil(min_segment_s / FRAME_S - 1e-9)))

    runs = _speech_runs(speech)
    runs = _absorb_short_silences(runs, min_silence_frames)
    runs = [(a, b) for a, b in runs if b - a >= min_segment_frames]

    duration = buf.duration_s
    padded: list[list[float]] = []
    for a, b in runs:
        start = max(0.0, a * FRAME_S - pad_s)
        end = min(duration, b * FRAME_S + pad_s)
        if padded and start <= padded[-1][1]:
            padded[-1][1] = max(padded[-1][1], end)
        else:
            padded.append([start, end])

    segments = [Segment(i, s, e) for i, (s, e) in enumerate(padded)]
    return SegmentSet(segments, source="silence_vad")


def _frame_db(buf: AudioBuffer) -> np.ndarray:
    """Per-frame RMS level in dB over non-overlapping 10 ms frames.

    A trailing partial frame is included so speech at the very end of the
    recording is not discarded.
    """
    hop = max(1, int(round(FRAME_S * buf.sample_rate_hz)))
    n_full = len(buf) // hop
    x = buf.samples
    rms_list = []
    if n_full:
        frames = x[: n_full * hop].reshape(n_full, hop)
        rms_list.append(np.sqrt(np.mean(frames * frames, axis=1)))
    if len(x) % hop:
        tail = x[n_full * hop :]
        rms_list.append(np.array([np.sqrt(np.mean(tail * tail))]))
    rms = np.concatenate(rms_list) if rms_list else np.zeros(0)
    return 20.0 * np.log10(np.maximum(rms, _RMS_FLOOR))


def _speech_runs(speech: np.ndarray) -> list[tuple[int, int]]:
    """Maximal runs of speech frames as half-open (start, end) frame indices."""
    idx = np.flatnonzero(np.diff(np.concatenate(([0], speech.astype(np.int8), [0]))))
    return list(zip(idx[0::2].tolist(), idx[1::2].tolist()))


def _absorb_short_silences(
    runs: list[tuple[int, int]], min_silence_frames: int
) -> list[tuple[int, int]]:
    if not runs:
        return runs
    merged = [runs[0]]
    for a, b in runs[1:]:
        if a - merged[-1][1] < min_silence_frames:
            merged[-1] = (merged[-1][0], b)
        else:
            merged.append((a, b))
    return merged


def load_segments(manifest: str | Path, audio_duration_s: float) -> SegmentSet:
    """Load a JSON segment manifest: [{"start_s": x, "end_s": y, ...}, ...].

    Entries are sorted by start time, clipped to [0, audio_duration_s], and
    re-numbered. Overlapping entries are a validation error reporting the
    offending manifest indices.
    """
    try:
        entries = json.loads(Path(manifest).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{manifest}: not valid JSON: {exc}") from exc
    if not isinstance(entries, list):
        raise ValidationError(f"{manifest}: expected a JSON array of segment objects")

    spans: list[tuple[float, float, int]] = []
    for i, entry in enumerate(entries):
        try:
            start = float(entry["start_s"])
            end = float(entry["end_s"])
        except (TypeError, KeyError) as exc:
            raise ValidationError(f"{manifest}: entry {i} lacks numeric start_s/end_s") from exc
        if end <= start:
            raise ValidationError(f"{manifest}: entry {i} has end_s {end} <= start_s {start}")
        spans.append((start, end, i))

    spans.sort(key=lambda s: (s[0], s[1]))
    overlaps = []
    running_end, running_idx = float("-inf"), -1
    for start, end, i in spans:
        if start < running_end:
            overlaps.append((running_idx, i))
        if end > running_end:
            running_end, running_idx = end, i
    if overlaps:
        listed = ", ".join(f"{a} and {b}" for a, b in overlaps)
        raise ValidationError(f"{manifest}: overlapping entries: indices {listed}")

    segments = []
    for start, end, i in spans:
        clipped_start = max(0.0, start)
        clipped_end = min(audio_duration_s, end)
        if (clipped_start, clipped_end) != (start, end):
            log.warning(
                "manifest entry %d [%g, %g] clipped to [%g, %g]",
                i, start, end, clipped_start, clipped_end,
            )
        if clipped_end <= clipped_start:
            log.warning("manifest entry %d lies outside the audio; dropped", i)
            continue
        segments.append(Segment(len(segments), clipped_start, clipped_end))
    return SegmentSet(segments, source="external_manifest")
