"""Transcript-free extractive speech-to-speech summarization.

Pipeline: silence segmentation (or an external segment manifest) -> frame
features (built-in MFCC or ESF1 deep-feature files) -> k-means pseudo-phoneme
quantization -> per-segment TF-IDF -> PCA subspace scoring -> budgeted
selection and audio concatenation. A ROUGE harness (ROUGE-1/2/SU4) supports
transcript-aligned validation.
"""

from .audio_io import AudioBuffer, read_wav, resample, write_wav
from .errors import ConfigError, EssummError, FormatError, ValidationError
from .features import FeatureMatrix, load_features, mfcc, slice_frames, store_features
from .lsa_scorer import LsaModel, ScoredSegment, TfIdfVector, fit_pca, score_segments, tfidf
from .quantizer import ClusterSequence, Codebook, fit_kmeans, quantize
from .rouge_eval import RougeScore, evaluate, rouge_n, rouge_su, tokenize
from .segmenter import Segment, SegmentSet, load_segments, segment_by_silence
from .summarizer import (
    Budget,
    SummaryManifest,
    TranscriptAlignment,
    concatenate,
    emit_summary_text,
    manifest_to_json,
    select,
)

__version__ = "0.1.0"

__all__ = [
    "AudioBuffer",
    "Budget",
    "ClusterSequence",
    "Codebook",
    "ConfigError",
    "EssummError",
    "FeatureMatrix",
    "FormatError",
    "LsaModel",
    "RougeScore",
    "ScoredSegment",
    "Segment",
    "SegmentSet",
    "SummaryManifest",
    "TfIdfVector",
    "TranscriptAlignment",
    "ValidationError",
    "concatenate",
    "emit_summary_text",
    "evaluate",
    "fit_kmeans",
    "fit_pca",
    "load_features",
    "load_segments",
    "manifest_to_json",
    "mfcc",
    "quantize",
    "read_wav",
    "resample",
    "rouge_n",
    "rouge_su",
    "score_segments",
    "segment_by_silence",
    "select",
    "slice_frames",
    "store_features",
    "tfidf",
    "tokenize",
    "write_wav",
]
