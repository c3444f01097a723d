"""Exception hierarchy shared by the pipeline stages.

The CLI maps these onto exit codes: ConfigError -> 1 (usage),
FormatError / ValidationError -> 2 (data), anything else -> 3 (internal).
"""


class EssummError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(EssummError):
    """Invalid parameters or an unusable combination of options."""


class FormatError(EssummError):
    """Malformed or unsupported input bytes (WAV containers, ESF1 files)."""


class ValidationError(EssummError):
    """Structurally valid input whose content violates a contract."""
