"""Exception and warning types shared across the engine.

The CLI maps these onto exit codes: ConfigurationError -> 2,
AbortedRunError -> 4, every other MiraError (and I/O failure) -> 3.
"""


class MiraError(Exception):
    """Base class for all engine errors."""


class FormatError(MiraError):
    """File or payload does not match a supported format (bad magic, codec, schema)."""


class CorruptFileError(MiraError):
    """File matches a known format but is truncated or internally inconsistent."""


class EmptyInputError(MiraError):
    """An operation received no frames / no samples where at least one is required."""


class DegenerateInputError(MiraError):
    """Input is structurally valid but meaningless for the operation (e.g. zero vector)."""


class DimensionError(MiraError):
    """Vector or matrix dimensions do not agree."""


class MissingEntryError(MiraError):
    """A manifest references a track or file that does not exist."""


class InsufficientDataError(MiraError):
    """Too few observations to fit the requested statistic."""


class InvalidInputError(MiraError):
    """Numeric input violates a precondition (e.g. matrix not symmetric)."""


class InvalidProportionError(MiraError):
    """Replication proportion is out of range or clips are too short for it."""


class SampleRateError(MiraError):
    """Clips that must share a sample rate do not."""


class ConfigurationError(MiraError):
    """Run configuration is invalid (unknown metric, missing binding, bad manifest pairing)."""


class AbortedRunError(MiraError):
    """Too many per-pair failures; the run result would be meaningless."""


class LowSampleWarning(UserWarning):
    """Fewer observations than dimensions when fitting a Gaussian."""
