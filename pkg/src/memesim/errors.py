"""Exception hierarchy shared across the engine.

Every error raised on a bad input derives from MemesimError so callers
(and the CLI exit-code mapping) can catch one base class.
"""


class MemesimError(Exception):
    """Base class for all engine errors."""


class SchemaError(MemesimError):
    """Input file header does not match the declared schema."""


class DuplicateIdError(MemesimError):
    """A meme id (or manifest id, or response key) occurs more than once."""


class EmptyInputError(MemesimError):
    """An operation received an empty corpus, table, or response set."""


class FormatError(MemesimError):
    """Binary file magic, version, or layout is wrong."""


class AlignmentError(MemesimError):
    """Manifest, matrix, and corpus row counts or id sets disagree."""


class DataError(MemesimError):
    """Payload values violate an invariant (NaN rows, broken simplex, ...)."""


class DimensionError(MemesimError):
    """Vector or matrix dimensions are incompatible."""


class DegenerateVectorError(MemesimError):
    """An all-zero vector where a direction is required."""


class ConfigurationError(MemesimError):
    """Invalid parameter value (threshold, weights, temperature, port, ...)."""


class LabelError(MemesimError):
    """Unknown emotion label string."""


class ConsistencyError(MemesimError):
    """A sidecar label disagrees with the argmax of its probabilities."""


class PartitionError(MemesimError):
    """Groups that should partition a corpus overlap or miss members."""


class ConflictError(MemesimError):
    """Duplicate (participant, group) survey response."""


class ParseError(MemesimError):
    """Malformed line in a structured text file."""

    def __init__(self, message: str, line_number: int | None = None):
        super().__init__(message)
        self.line_number = line_number


class UnknownIdError(MemesimError):
    """Lookup of a meme id or group id that does not exist."""
