"""export-features: dump encoder hidden states to an ESF1 feature file."""

from __future__ import annotations

import argparse
import logging
import sys

from .export import DEFAULT_CHUNK_S, ExportError, export_features


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s")
    parser = argparse.ArgumentParser(
        prog="export-features",
        description="Export frame-level hidden states of a pretrained speech "
        "encoder to the ESF1 format consumed by the summarizer.",
    )
    parser.add_argument("--input", required=True, help="input WAV (any PCM rate; resampled)")
    parser.add_argument("--out", required=True, help="output ESF1 path")
    parser.add_argument("--model", required=True,
                        help="encoder identifier or local directory")
    parser.add_argument("--layer", type=int, default=None,
                        help="hidden-state index: 0 = conv features, i = after "
                        "transformer block i (default: mid-depth)")
    parser.add_argument("--chunk-s", type=float, default=DEFAULT_CHUNK_S,
                        help="chunk length in seconds for long inputs (default 30)")
    parser.add_argument("--no-normalize", action="store_true",
                        help="skip whole-recording mean/variance normalization")
    args = parser.parse_args(argv)

    try:
        stats = export_features(
            args.input, args.out, model_id=args.model, layer=args.layer,
            chunk_s=args.chunk_s, normalize=not args.no_normalize,
        )
    except ExportError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    logging.info(
        "wrote %s: %d frames x %d dims from layer %d",
        args.out, stats["n_frames"], stats["dim"], stats["layer"],
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
