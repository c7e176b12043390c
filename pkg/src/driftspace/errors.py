"""Exception types shared across the package.

The CLI maps these onto distinct exit codes (see cli.EXIT_*), so new error
conditions should reuse or subclass one of the classes below rather than
raising bare exceptions.
"""


class DriftspaceError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(DriftspaceError):
    """A parameter value is invalid or a configuration is inconsistent."""


class CombineMismatchError(ConfigError):
    """Spaces built under different configurations cannot be combined."""


class MissingDataError(DriftspaceError):
    """An expected corpus file, directory, or epoch is absent."""


class TermNotFoundError(DriftspaceError):
    """A requested term has no entry in the space."""

    def __init__(self, term: str):
        super().__init__(f"term not found: {term!r}")
        self.term = term


class UndefinedSimilarityError(DriftspaceError):
    """Similarity involving a zero vector is undefined."""


class SpaceFormatError(DriftspaceError):
    """Base class for problems with an on-disk space file."""


class BadMagicError(SpaceFormatError):
    """The file does not start with the space-file magic bytes."""


class VersionMismatchError(SpaceFormatError):
    """The file was written by an unsupported format version."""


class TruncatedFileError(SpaceFormatError):
    """The file ends before a complete header or record.

    ``offset`` is the byte position where reading stopped; ``expected`` is
    the position the next full field would have required.
    """

    def __init__(self, offset: int, expected: int, what: str):
        super().__init__(
            f"truncated space file: needed bytes up to offset {expected} "
            f"for {what}, file ends at offset {offset}"
        )
        self.offset = offset
        self.expected = expected


class ChecksumError(SpaceFormatError):
    """A stored CRC does not match the bytes on disk."""
