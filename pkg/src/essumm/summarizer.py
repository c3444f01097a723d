"""Summary assembly: budgeted rank-order selection and audio concatenation.

Selection walks segments in descending score order and accumulates their
lengths until the budget is reached; the segment that first reaches or
crosses the budget is still included, then selection stops. The selected
set is therefore always a prefix of the rank order. Output is re-sorted
chronologically so the summary plays in recording order.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .audio_io import AudioBuffer
from .errors import ConfigError, ValidationError
from .lsa_scorer import ScoredSegment
from .segmenter import Segment

log = logging.getLogger("essumm.summarizer")


@dataclass
class Budget:
    kind: str  # "seconds" or "words"
    amount: float

    def __post_init__(self) -> None:
        if self.kind not in ("seconds", "words"):
            raise ConfigError(f"budget kind must be 'seconds' or 'words', got {self.kind!r}")
        if self.amount <= 0:
            raise ConfigError(f"budget amount must be positive, got {self.amount}")
        if self.kind == "words":
            self.amount = int(self.amount)


@dataclass
class AlignmentEntry:
    start_s: float
    end_s: float
    text: str

    def __post_init__(self) -> None:
        if self.end_s <= self.start_s:
            raise ValidationError(
                f"alignment entry has end_s {self.end_s} <= start_s {self.start_s}"
            )

    @property
    def midpoint_s(self) -> float:
        return 0.5 * (self.start_s + self.end_s)

    @property
    def word_count(self) -> int:
        return len(self.text.split())


@dataclass
class TranscriptAlignment:
    entries: list[AlignmentEntry]

    @classmethod
    def load(cls, path: str | Path) -> "TranscriptAlignment":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: not valid JSON: {exc}") from exc
        if not isinstance(raw, list):
            raise ValidationError(f"{path}: expected a JSON array of alignment entries")
        entries = []
        for i, entry in enumerate(raw):
            try:
                entries.append(
                    AlignmentEntry(
                        float(entry["start_s"]),
                        float(entry["end_s"]),
                        str(entry.get("text", "")),
                    )
                )
            except (TypeError, KeyError) as exc:
                raise ValidationError(f"{path}: entry {i} lacks numeric start_s/end_s") from exc
        return cls(entries)


@dataclass
class SelectedSegment:
    segment: Segment
    distance: float
    score: float
    rank: int  # 1-based position in the descending-score order
    length_contribution: float


@dataclass
class SummaryManifest:
    selected: list[SelectedSegment] = field(default_factory=list)
    total_seconds: float = 0.0
    total_words: int | None = None
    budget: Budget | None = None


def select(
    scored: list[ScoredSegment],
    budget: Budget,
    alignment: TranscriptAlignment | None = None,
) -> SummaryManifest:
    """Pick the highest-scoring segments until the budget is reached.

    Length is the segment duration for a seconds budget, or the whitespace
    token count of alignment entries whose midpoints fall inside the segment
    for a words budget. At least one segment is selected when the input is
    non-empty; an empty input yields an empty manifest with a warning.
    """
    if budget.kind == "words" and alignment is None:
        raise ConfigError("a words budget requires a transcript alignment")
    if not scored:
        log.warning("no scored segments; emitting an empty summary manifest")
        return SummaryManifest(budget=budget, total_words=0 if alignment else None)

    ranked = sorted(scored, key=lambda s: (-s.score, s.segment.start_s))
    picked: list[SelectedSegment] = []
    cumulative = 0.0
    for rank, item in enumerate(ranked, start=1):
        length = _segment_length(item.segment, budget, alignment)
        cumulative += length
        picked.append(
            SelectedSegment(item.segment, item.distance, item.score, rank, length)
        )
        if cumulative >= budget.amount:
            break

    picked.sort(key=lambda s: s.segment.start_s)
    total_seconds = sum(s.segment.duration_s for s in picked)
    total_words = None
    if alignment is not None:
        total_words = sum(
            _segment_words(s.segment, alignment) for s in picked
        )
    return SummaryManifest(
        selected=picked,
        total_seconds=total_seconds,
        total_words=total_words,
        budget=budget,
    )


def _segment_length(seg: Segment, budget: Budget, alignment: TranscriptAlignment | None) -> float:
    if budget.kind == "seconds":
        return seg.duration_s
    return float(_segment_words(seg, alignment))


def _segment_words(seg: Segment, alignment: TranscriptAlignment) -> int:
    return sum(
        e.word_count for e in alignment.entries if seg.start_s <= e.midpoint_s < seg.end_s
    )


def concatenate(buf: AudioBuffer, manifest: SummaryManifest, gap_s: float = 0.0) -> AudioBuffer:
    """Join the selected sample ranges chronologically.

    Boundaries are rounded to the nearest sample (half-open ranges); gap_s of
    silence is inserted between consecutive segments.
    """
    if gap_s < 0:
        raise ConfigError(f"gap_s must be >= 0, got {gap_s}")
    rate = buf.sample_rate_hz
    gap = np.zeros(_round_half_up(gap_s * rate))
    pieces = []
    for i, sel in enumerate(manifest.selected):
        a = _round_half_up(sel.segment.start_s * rate)
        b = _round_half_up(sel.segment.end_s * rate)
        if a < 0 or b > len(buf.samples):
            raise ValidationError(
                f"segment {sel.segment.id} [{sel.segment.start_s}, {sel.segment.end_s}] "
                f"exceeds the audio bounds (samples {a}..{b} of {len(buf.samples)})"
            )
        if i and len(gap):
            pieces.append(gap)
        pieces.append(buf.samples[a:b])
    samples = np.concatenate(pieces) if pieces else np.zeros(0)
    return AudioBuffer(samples, rate)


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def emit_summary_text(manifest: SummaryManifest, alignment: TranscriptAlignment) -> str:
    """Transcript of the summary: texts of alignment entries whose midpoints
    fall in selected segments, chronological and space-joined."""
    chunks = []
    for e in sorted(alignment.entries, key=lambda e: (e.start_s, e.end_s)):
        if any(
            s.segment.start_s <= e.midpoint_s < s.segment.end_s for s in manifest.selected
        ):
            chunks.append(e.text)
    return " ".join(chunks)


def manifest_to_json(manifest: SummaryManifest) -> str:
    """Canonical manifest serialization: fixed key order, floats with six
    decimal digits, so identical runs produce byte-identical files."""
    if manifest.budget is None:
        raise ConfigError("manifest has no budget")
    amount = manifest.budget.amount
    amount_json = str(int(amount)) if manifest.budget.kind == "words" else _f(amount)
    words_json = "null" if manifest.total_words is None else str(manifest.total_words)
    rows = ", ".join(
        "{"
        + f'"id": {s.segment.id}, "start_s": {_f(s.segment.start_s)}, '
        + f'"end_s": {_f(s.segment.end_s)}, "score": {_f(s.score)}, '
        + f'"distance": {_f(s.distance)}, "rank": {s.rank}'
        + "}"
        for s in manifest.selected
    )
    return (
        "{"
        + f'"budget": {{"kind": "{manifest.budget.kind}", "amount": {amount_json}}}, '
        + f'"total_seconds": {_f(manifest.total_seconds)}, '
        + f'"total_words": {words_json}, '
        + f'"selected": [{rows}]'
        + "}\n"
    )


def _f(x: float) -> str:
    return format(float(x), ".6f")


def write_manifest(manifest: SummaryManifest, path: str | Path) -> None:
    Path(path).write_text(manifest_to_json(manifest), encoding="utf-8")
