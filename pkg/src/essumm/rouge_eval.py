"""ROUGE-1 / ROUGE-2 / ROUGE-SU4 with multi-reference and macro averaging.

Conventions (fixed here; other ROUGE tools differ, so expect score offsets):
no stemming, no stopword removal, lowercase alphanumeric tokenization,
clipped multiset n-gram counting. The SU4 unit pool of a text is all ordered
skip-bigrams with at most four tokens between the pair, plus all unigrams.
With several references per meeting the best-F1 reference's scores are the
primary result (the per-reference mean is reported alongside); corpus scores
are unweighted means over meetings.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass

from .errors import ConfigError, ValidationError

METRICS = ("rouge1", "rouge2", "rougesu4")

# unicode alphanumerics, excluding the underscore that \w would admit
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


@dataclass(frozen=True)
class RougeScore:
    recall: float
    precision: float
    f1: float

    @classmethod
    def from_counts(cls, overlap: int, n_ref: int, n_hyp: int) -> "RougeScore":
        r = overlap / n_ref if n_ref else 0.0
        p = overlap / n_hyp if n_hyp else 0.0
        f1 = 2.0 * r * p / (r + p) if r + p > 0 else 0.0
        return cls(r, p, f1)

    def as_dict(self) -> dict[str, float]:
        return {"recall": self.recall, "precision": self.precision, "f1": self.f1}


def tokenize(text: str) -> list[str]:
    """Lowercase and split on any non-alphanumeric character."""
    return _TOKEN_RE.findall(text.lower())


def rouge_n(hyp: list[str], ref: list[str], n: int) -> RougeScore:
    """Clipped n-gram multiset overlap."""
    if n < 1:
        raise ConfigError(f"n must be >= 1, got {n}")
    hyp_grams = _ngrams(hyp, n)
    ref_grams = _ngrams(ref, n)
    overlap = sum((hyp_grams & ref_grams).values())
    return RougeScore.from_counts(overlap, sum(ref_grams.values()), sum(hyp_grams.values()))


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_su(hyp: list[str], ref: list[str], max_gap: int = 4) -> RougeScore:
    """Skip-bigram-plus-unigram overlap.

    A text's unit pool contains every ordered pair (tokens[i], tokens[j]),
    i < j, with j - i - 1 <= max_gap, plus every unigram; overlap is clipped
    multiset intersection over those pools.
    """
    if max_gap < 0:
        raise ConfigError(f"max_gap must be >= 0, got {max_gap}")
    hyp_units = _su_units(hyp, max_gap)
    ref_units = _su_units(ref, max_gap)
    overlap = sum((hyp_units & ref_units).values())
    return RougeScore.from_counts(overlap, sum(ref_units.values()), sum(hyp_units.values()))


def _su_units(tokens: list[str], max_gap: int) -> Counter:
    units: Counter = Counter(("u", t) for t in tokens)
    for i in range(len(tokens)):
        for j in range(i + 1, min(len(tokens), i + max_gap + 2)):
            units[("s", tokens[i], tokens[j])] += 1
    return units


def _score_one(hyp: list[str], ref: list[str], metric: str) -> RougeScore:
    if metric == "rouge1":
        return rouge_n(hyp, ref, 1)
    if metric == "rouge2":
        return rouge_n(hyp, ref, 2)
    if metric == "rougesu4":
        return rouge_su(hyp, ref, 4)
    raise ConfigError(f"unknown metric {metric!r} (choose from {', '.join(METRICS)})")


def evaluate(
    hyps: list[tuple[str, str]],
    refs: list[tuple[str, list[str]]],
    truncate_words: int | None = None,
    metrics: tuple[str, ...] = METRICS,
) -> dict:
    """Score each hypothesis against its references and macro-average.

    hyps: (meeting_id, text) pairs; refs: (meeting_id, [texts]). Hypotheses
    are optionally truncated to their first truncate_words tokens. Per
    meeting and metric, the report carries the best-F1 reference's scores
    and the per-reference mean; the macro block is the unweighted mean of
    the best scores over meetings.
    """
    for metric in metrics:
        if metric not in METRICS:
            raise ConfigError(f"unknown metric {metric!r} (choose from {', '.join(METRICS)})")
    ref_map = {mid: texts for mid, texts in refs}
    per_meeting: dict[str, dict] = {}
    for mid, hyp_text in sorted(hyps, key=lambda h: h[0]):
        if mid not in ref_map or not ref_map[mid]:
            raise ValidationError(f"no reference summary for meeting {mid!r}")
        hyp_tokens = tokenize(hyp_text)
        if truncate_words is not None:
            hyp_tokens = hyp_tokens[:truncate_words]
        ref_tokens = [tokenize(t) for t in ref_map[mid]]
        block: dict[str, dict] = {}
        for metric in metrics:
            scores = [_score_one(hyp_tokens, rt, metric) for rt in ref_tokens]
            best = max(scores, key=lambda s: s.f1)  # first best on ties
            mean = RougeScore(
                sum(s.recall for s in scores) / len(scores),
                sum(s.precision for s in scores) / len(scores),
                sum(s.f1 for s in scores) / len(scores),
            )
            block[metric] = {"best": best.as_dict(), "mean": mean.as_dict()}
        per_meeting[mid] = block

    macro = {}
    for metric in metrics:
        vals = [per_meeting[mid][metric]["best"] for mid in per_meeting]
        n = len(vals)
        macro[metric] = {
            "recall": sum(v["recall"] for v in vals) / n if n else 0.0,
            "precision": sum(v["precision"] for v in vals) / n if n else 0.0,
            "f1": sum(v["f1"] for v in vals) / n if n else 0.0,
        }
    return {"per_meeting": per_meeting, "macro": macro}
