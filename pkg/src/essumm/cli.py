"""Command-line pipeline: summarize, features, eval, inspect.

Exit codes: 0 success, 1 usage error, 2 data/format error, 3 internal
invariant violation. Every failure prints a single diagnostic line naming
the stage that raised it. ESSUMM_LOG={error,warn,info,debug} controls log
verbosity (default warn).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import audio_io, features, lsa_scorer, quantizer, rouge_eval, segmenter, summarizer
from .errors import ConfigError, EssummError, FormatError, ValidationError

log = logging.getLogger("essumm.cli")

WORKING_RATE = 16000

_LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the contract here is 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: usage: {message}", file=sys.stderr)
        raise SystemExit(1)


def _stage(name: str):
    """Decorator tagging pipeline steps so failures name their stage."""

    def wrap(fn):
        def run(*args, **kwargs):
            try:
                return fn(*args, **kwargs)
            except EssummError as exc:
                raise StageFailure(name, exc) from exc
            except OSError as exc:
                raise StageFailure(name, FormatError(str(exc))) from exc

        return run

    return wrap


class StageFailure(Exception):
    def __init__(self, stage: str, cause: EssummError):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StageFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1 if isinstance(exc.cause, ConfigError) else 2
    except EssummError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1 if isinstance(exc, ConfigError) else 2
    except Exception as exc:  # noqa: BLE001 - map bugs to the documented exit code
        print(f"error: internal: {exc}", file=sys.stderr)
        return 3


def _setup_logging() -> None:
    level = _LOG_LEVELS.get(os.environ.get("ESSUMM_LOG", "warn").lower(), logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="essumm", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sum = sub.add_parser("summarize", help="run the full pipeline on one recording")
    _add_pipeline_args(p_sum)
    budget = p_sum.add_mutually_exclusive_group(required=True)
    budget.add_argument("--target-seconds", type=float, help="summary length budget in seconds")
    budget.add_argument("--target-words", type=int, help="summary word-count budget")
    p_sum.add_argument("--out-wav", required=True, help="output summary WAV path")
    p_sum.add_argument("--out-manifest", required=True, help="output manifest JSON path")
    p_sum.add_argument("--gap-ms", type=float, default=0.0,
                       help="silence inserted between joined segments (default 0)")
    p_sum.set_defaults(func=cmd_summarize)

    p_feat = sub.add_parser("features", help="extract MFCC features to an ESF1 file")
    p_feat.add_argument("--input", required=True, help="input WAV path")
    p_feat.add_argument("--out", required=True, help="output ESF1 path")
    p_feat.add_argument("--no-resample", action="store_true",
                        help="fail instead of resampling non-16kHz input")
    p_feat.set_defaults(func=cmd_features)

    p_eval = sub.add_parser("eval", help="score hypothesis summaries with ROUGE")
    p_eval.add_argument("mapping", help='JSON: {"meeting_id": {"hyp": path, "refs": [paths]}}')
    p_eval.add_argument("--metrics", default="rouge1,rouge2,rougesu4",
                        help="comma-separated subset of rouge1,rouge2,rougesu4")
    p_eval.add_argument("--truncate-words", type=int, default=None,
                        help="truncate each hypothesis to its first N tokens")
    p_eval.add_argument("--out", default=None, help="report path (default stdout)")
    p_eval.set_defaults(func=cmd_eval)

    p_ins = sub.add_parser("inspect", help="print the scored segment table without selecting")
    _add_pipeline_args(p_ins)
    p_ins.set_defaults(func=cmd_inspect)
    return parser


def _add_pipeline_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", required=True, help="input WAV path")
    p.add_argument("--features", default="mfcc",
                   help="'mfcc' or 'file:PATH' for precomputed ESF1 features")
    p.add_argument("--segments", default="vad",
                   help="'vad' or 'manifest:PATH' for an external segmentation")
    p.add_argument("--k", type=int, default=32, help="codebook size (default 32)")
    p.add_argument("--pca-components", type=int, default=4,
                   help="principal components kept (default 4)")
    p.add_argument("--alignment", default=None,
                   help="transcript alignment JSON (needed for word budgets)")
    p.add_argument("--min-silence-ms", type=float, default=500.0,
                   help="minimum silence gap that splits segments (default 500)")
    p.add_argument("--seed", type=int, default=0, help="PRNG seed (default 0)")
    p.add_argument("--no-resample", action="store_true",
                   help="fail instead of resampling non-16kHz input")


def _load_audio(args) -> audio_io.AudioBuffer:
    buf = _stage("read_wav")(audio_io.read_wav)(args.input)
    if buf.sample_rate_hz != WORKING_RATE:
        if args.no_resample:
            raise StageFailure(
                "resample",
                ConfigError(
                    f"input is {buf.sample_rate_hz} Hz and --no-resample was given"
                ),
            )
        buf = _stage("resample")(audio_io.resample)(buf, WORKING_RATE)
    return buf


def _load_segments(args, buf) -> segmenter.SegmentSet:
    if args.segments == "vad":
        return _stage("segment_by_silence")(segmenter.segment_by_silence)(
            buf, min_silence_s=args.min_silence_ms / 1000.0
        )
    if args.segments.startswith("manifest:"):
        return _stage("load_segments")(segmenter.load_segments)(
            args.segments[len("manifest:"):], buf.duration_s
        )
    raise ConfigError(f"--segments must be 'vad' or 'manifest:PATH', got {args.segments!r}")


def _load_feature_matrix(args, buf) -> features.FeatureMatrix:
    if args.features == "mfcc":
        fm = _stage("mfcc")(features.mfcc)(buf)
    elif args.features.startswith("file:"):
        fm = _stage("load_features")(features.load_features)(args.features[len("file:"):])
    else:
        raise ConfigError(f"--features must be 'mfcc' or 'file:PATH', got {args.features!r}")
    # normalize to the ESF1 storage dtype so the in-process and sidecar
    # paths produce bit-identical downstream results
    return features.FeatureMatrix(
        np.asarray(fm.frames, dtype=np.float32), fm.frame_hop_s, fm.first_center_s
    )


def _score_pipeline(args, buf) -> list[lsa_scorer.ScoredSegment]:
    segs = _load_segments(args, buf)
    if len(segs) == 0:
        log.warning("no segments detected; nothing to score")
        return []
    fm = _load_feature_matrix(args, buf)
    if len(segs) == 1:
        # PCA needs two or more segments; a single candidate is the summary
        only = segs.segments[0]
        return [lsa_scorer.ScoredSegment(segment=only, distance=0.0, score=1.0)]

    k = args.k
    if fm.n_frames < k:
        log.warning("only %d frames for k=%d; clamping k", fm.n_frames, k)
        k = max(1, fm.n_frames)
    cb = _stage("fit_kmeans")(quantizer.fit_kmeans)(fm, k=k, seed=args.seed)
    sequences = [
        _stage("quantize")(quantizer.quantize)(features.slice_frames(fm, seg), cb)
        for seg in segs
    ]
    vectors = _stage("tfidf")(lsa_scorer.tfidf)(sequences, k)

    n_comp = args.pca_components
    max_comp = min(len(segs) - 1, k)
    if n_comp > max_comp:
        log.warning("clamping pca components from %d to %d", n_comp, max_comp)
        n_comp = max(1, max_comp)
    model = _stage("fit_pca")(lsa_scorer.fit_pca)(vectors, n_comp)
    return _stage("score_segments")(lsa_scorer.score_segments)(vectors, model, segs)


def cmd_summarize(args) -> int:
    buf = _load_audio(args)
    scored = _score_pipeline(args, buf)

    if args.target_seconds is not None:
        budget = summarizer.Budget("seconds", args.target_seconds)
    else:
        budget = summarizer.Budget("words", args.target_words)
    alignment = None
    if args.alignment:
        alignment = _stage("alignment")(summarizer.TranscriptAlignment.load)(args.alignment)

    manifest = _stage("select")(summarizer.select)(scored, budget, alignment)
    out = _stage("concatenate")(summarizer.concatenate)(buf, manifest, args.gap_ms / 1000.0)
    _stage("write_wav")(audio_io.write_wav)(out, args.out_wav)
    _stage("write_manifest")(summarizer.write_manifest)(manifest, args.out_manifest)
    log.info(
        "selected %d segments, %.3f s of audio", len(manifest.selected), manifest.total_seconds
    )
    return 0


def cmd_features(args) -> int:
    buf = _load_audio(args)
    fm = _stage("mfcc")(features.mfcc)(buf)
    _stage("store_features")(features.store_features)(fm, args.out)
    return 0


def cmd_eval(args) -> int:
    metrics = tuple(m.strip() for m in args.metrics.split(",") if m.strip())
    try:
        mapping = json.loads(Path(args.mapping).read_text(encoding="utf-8"))
    except OSError as exc:
        raise StageFailure("eval", FormatError(str(exc))) from exc
    except json.JSONDecodeError as exc:
        raise StageFailure("eval", ValidationError(f"{args.mapping}: {exc}")) from exc

    hyps, refs = [], []
    for mid, entry in mapping.items():
        try:
            hyp_path = entry["hyp"]
            ref_paths = entry["refs"]
        except (TypeError, KeyError) as exc:
            raise StageFailure(
                "eval", ValidationError(f"meeting {mid!r} needs 'hyp' and 'refs'")
            ) from exc
        hyps.append((mid, _read_text(hyp_path)))
        refs.append((mid, [_read_text(p) for p in ref_paths]))

    report = _stage("evaluate")(rouge_eval.evaluate)(
        hyps, refs, truncate_words=args.truncate_words, metrics=metrics
    )
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise StageFailure("eval", FormatError(str(exc))) from exc


def cmd_inspect(args) -> int:
    buf = _load_audio(args)
    scored = _score_pipeline(args, buf)
    ranked = sorted(scored, key=lambda s: (-s.score, s.segment.start_s))
    rank_of = {id(s): i + 1 for i, s in enumerate(ranked)}
    print("id\tstart_s\tend_s\tduration_s\tscore\trank")
    for s in scored:
        seg = s.segment
        print(
            f"{seg.id}\t{seg.start_s:.6f}\t{seg.end_s:.6f}\t{seg.duration_s:.6f}"
            f"\t{s.score:.6f}\t{rank_of[id(s)]}"
        )
    if not scored:
        print("warning: no segments to inspect", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
