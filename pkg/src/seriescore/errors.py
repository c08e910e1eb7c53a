"""Exception taxonomy for the series search engine.

Every library error derives from :class:`SeriesSearchError` so callers can
catch engine failures without swallowing unrelated bugs.  The CLI maps
subclasses onto process exit codes (config errors vs. data errors).
"""


class SeriesSearchError(Exception):
    """Base class for all engine errors."""


class DegenerateSeries(SeriesSearchError):
    """Series cannot be z-normalized (constant, or fewer than 2 points)."""


class LengthMismatch(SeriesSearchError):
    """Two series (or a query and a dataset) differ in length."""


class ShapeMismatch(SeriesSearchError):
    """Summaries or bounds built with incompatible shapes/parameters."""


class EmptyDataset(SeriesSearchError):
    """Operation requires at least one series."""


class BadSegmentation(SeriesSearchError):
    """Segment layout does not tile the series length."""


class BadLength(SeriesSearchError):
    """Invalid transform length (odd coefficient count, not a power of two, ...)."""


class BadAlphabet(SeriesSearchError):
    """Alphabet size is unusable (too small, or not a power of two where required)."""


class EmptySample(SeriesSearchError):
    """Training sample for bins or grids is empty."""


class BadBudget(SeriesSearchError):
    """Quantization bit budget is too small for the dimension count."""


class BadCounts(SeriesSearchError):
    """Counter arithmetic received out-of-range values."""


class EmptyLeaf(SeriesSearchError):
    """A leaf-level measure was asked about an empty leaf."""


class BadCardinality(SeriesSearchError):
    """A fixed-cardinality procedure received the wrong number of inputs."""


class InsufficientQueries(SeriesSearchError):
    """Too few queries to build the requested easy/hard subsets."""


class ExactZeroDivision(SeriesSearchError):
    """Relative error undefined: exact distance is zero but approximate is not."""


class SizeMismatch(SeriesSearchError):
    """Binary dataset file size disagrees with its sidecar metadata."""


class BadFloat(SeriesSearchError):
    """Non-finite value encountered where finite data is required."""


class BadBuffer(SeriesSearchError):
    """I/O buffer too small to hold a single series."""


class CorruptIndex(SeriesSearchError):
    """Index container bytes are not a valid serialized index."""


class ConfigError(SeriesSearchError):
    """Invalid or inconsistent harness configuration."""


class VerificationFailure(SeriesSearchError):
    """A verified run disagreed with the sequential-scan oracle."""
