"""Deep-feature sidecar: exports pretrained speech-encoder hidden states to
ESF1 files for the transcript-free summarizer. The byte format is the only
coupling between the two packages."""

from .export import EncoderGeometry, ExportError, export_features, geometry_from_config

__version__ = "0.1.0"

__all__ = ["EncoderGeometry", "ExportError", "export_features", "geometry_from_config"]
