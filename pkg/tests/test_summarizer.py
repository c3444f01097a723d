import json

import numpy as np
import pytest

from essumm.audio_io import AudioBuffer
from essumm.errors import ConfigError, ValidationError
from essumm.lsa_scorer import ScoredSegment
from essumm.segmenter import Segment
from essumm.summarizer import (
    AlignmentEntry,
    Budget,
    TranscriptAlignment,
    concatenate,
    emit_summary_text,
    manifest_to_json,
    select,
)


def _scored(scores, durations, gap=1.0):
    """Non-overlapping consecutive segments with the given scores/durations."""
    out, t = [], 0.0
    for i, (score, dur) in enumerate(zip(scores, durations)):
        seg = Segment(i, t, t + dur)
        out.append(ScoredSegment(segment=seg, distance=1.0 / score - 1.0, score=score))
        t += dur + gap
    return out


def test_crossing_segment_included_then_stop():
    scored = _scored([0.9, 0.5, 0.8], [10.0, 10.0, 10.0])
    manifest = select(scored, Budget("seconds", 15.0))
    assert [s.segment.id for s in manifest.selected] == [0, 2]
    assert [s.rank for s in manifest.selected] == [1, 2]
    assert manifest.total_seconds == pytest.approx(20.0)


def test_budget_larger_than_total_selects_all():
    scored = _scored([0.2, 0.9, 0.5], [1.0, 2.0, 3.0])
    manifest = select(scored, Budget("seconds", 100.0))
    assert [s.segment.id for s in manifest.selected] == [0, 1, 2]


def test_single_segment_always_selected():
    scored = _scored([0.4], [30.0])
    manifest = select(scored, Budget("seconds", 0.001))
    assert len(manifest.selected) == 1


def test_empty_scored_list_gives_empty_manifest():
    manifest = select([], Budget("seconds", 5.0))
    assert manifest.selected == []
    assert manifest.total_seconds == 0.0


def test_words_budget_requires_alignment():
    with pytest.raises(ConfigError, match="alignment"):
        select(_scored([0.5], [1.0]), Budget("words", 10))


def test_words_budget_counts_midpoint_tokens():
    scored = _scored([0.9, 0.8], [2.0, 2.0], gap=0.0)
    alignment = TranscriptAlignment([
        AlignmentEntry(0.0, 1.0, "alpha beta"),
        AlignmentEntry(1.2, 1.8, "gamma"),
        AlignmentEntry(2.5, 3.5, "delta epsilon zeta"),
    ])
    manifest = select(scored, Budget("words", 3), alignment)
    # seg 0 carries 3 words -> budget reached immediately
    assert [s.segment.id for s in manifest.selected] == [0]
    assert manifest.total_words == 3


def test_budget_validation():
    with pytest.raises(ConfigError):
        Budget("minutes", 3)
    with pytest.raises(ConfigError):
        Budget("seconds", 0)


def test_selection_contract_property():
    # acceptance-grade randomized property: prefix of rank order,
    # cumulative-minus-last < budget, chronological output
    rng = np.random.default_rng(2024)
    for case in range(1000):
        n = int(rng.integers(1, 12))
        durations = rng.uniform(0.2, 8.0, size=n)
        scores = rng.uniform(0.01, 1.0, size=n)
        scored = _scored(scores.tolist(), durations.tolist())
        use_words = case % 3 == 2
        if use_words:
            alignment = TranscriptAlignment([
                AlignmentEntry(s.segment.start_s, s.segment.end_s,
                               " ".join(["w"] * int(rng.integers(0, 9))))
                for s in scored
            ])
            budget = Budget("words", int(rng.integers(1, 30)))
        else:
            alignment = None
            budget = Budget("seconds", float(rng.uniform(0.1, durations.sum() * 1.2)))
        manifest = select(scored, budget, alignment)

        assert manifest.selected, f"case {case}: nothing selected"
        ranked_ids = [s.segment.id for s in
                      sorted(scored, key=lambda s: (-s.score, s.segment.start_s))]
        selected_ids = {s.segment.id for s in manifest.selected}
        assert selected_ids == set(ranked_ids[: len(selected_ids)]), f"case {case}: not a prefix"

        by_rank = sorted(manifest.selected, key=lambda s: s.rank)
        head = sum(s.length_contribution for s in by_rank[:-1])
        assert head < budget.amount, f"case {case}: head {head} >= budget {budget.amount}"

        starts = [s.segment.start_s for s in manifest.selected]
        assert starts == sorted(starts), f"case {case}: not chronological"


def test_concatenate_lengths_and_gap():
    rate = 16000
    buf = AudioBuffer(np.arange(4 * rate) / (4 * rate), rate)
    scored = _scored([0.9, 0.8], [1.0, 1.0], gap=1.0)
    manifest = select(scored, Budget("seconds", 100.0))
    out = concatenate(buf, manifest)
    assert len(out) == 2 * rate
    out_gap = concatenate(buf, manifest, gap_s=0.1)
    assert len(out_gap) == 2 * rate + 1600
    np.testing.assert_array_equal(out_gap.samples[rate : rate + 1600], np.zeros(1600))


def test_concatenate_whole_buffer_identity():
    rate = 16000
    buf = AudioBuffer(np.linspace(-0.5, 0.5, rate), rate)
    scored = [ScoredSegment(Segment(0, 0.0, 1.0), 0.0, 1.0)]
    manifest = select(scored, Budget("seconds", 1.0))
    out = concatenate(buf, manifest)
    np.testing.assert_array_equal(out.samples, buf.samples)


def test_concatenate_out_of_bounds_rejected():
    buf = AudioBuffer(np.zeros(16000), 16000)
    scored = [ScoredSegment(Segment(0, 0.5, 1.5), 0.0, 1.0)]
    manifest = select(scored, Budget("seconds", 10.0))
    with pytest.raises(ValidationError, match="exceeds"):
        concatenate(buf, manifest)


def test_emit_summary_text_midpoint_rule():
    scored = _scored([0.9, 0.8], [2.0, 2.0], gap=0.0)
    manifest = select(scored, Budget("seconds", 100.0))
    alignment = TranscriptAlignment([
        AlignmentEntry(0.0, 1.0, "hello there"),
        AlignmentEntry(2.2, 2.8, "bye"),
        AlignmentEntry(3.9, 4.5, "outside"),  # midpoint 4.2 beyond seg end 4.0
    ])
    assert emit_summary_text(manifest, alignment) == "hello there bye"

    empty = select([], Budget("seconds", 5.0))
    assert emit_summary_text(empty, alignment) == ""


def test_manifest_json_schema_and_formatting():
    scored = _scored([0.75, 0.5], [1.5, 1.0])
    manifest = select(scored, Budget("seconds", 100.0))
    text = manifest_to_json(manifest)
    doc = json.loads(text)
    assert list(doc.keys()) == ["budget", "total_seconds", "total_words", "selected"]
    assert list(doc["selected"][0].keys()) == [
        "id", "start_s", "end_s", "score", "distance", "rank",
    ]
    assert doc["budget"] == {"kind": "seconds", "amount": 100.0}
    assert doc["total_words"] is None
    assert '"total_seconds": 2.500000' in text
    assert '"score": 0.750000' in text


def test_manifest_json_deterministic():
    scored = _scored([0.9, 0.2, 0.5], [1.0, 2.0, 3.0])
    a = manifest_to_json(select(scored, Budget("seconds", 4.0)))
    b = manifest_to_json(select(scored, Budget("seconds", 4.0)))
    assert a == b


def test_alignment_load_and_validation(tmp_path):
    path = tmp_path / "align.json"
    path.write_text(json.dumps([
        {"start_s": 0.0, "end_s": 1.0, "text": "first words"},
        {"start_s": 1.0, "end_s": 2.0},
    ]), encoding="utf-8")
    alignment = TranscriptAlignment.load(path)
    assert alignment.entries[0].word_count == 2
    assert alignment.entries[1].text == ""

    path.write_text(json.dumps([{"start_s": 2.0, "end_s": 1.0, "text": "x"}]))
    with pytest.raises(ValidationError):
        TranscriptAlignment.load(path)
