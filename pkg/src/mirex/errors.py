"""Exception hierarchy shared by all mirex modules."""


class MirexError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(MirexError):
    """A malformed input line (wrong field count, bad escape, bad number)."""


class FormatError(MirexError):
    """A structurally invalid file: bad header, version mismatch, truncation."""


class IntegrityError(MirexError):
    """Data that violates a uniqueness or consistency invariant."""


class ConfigurationError(MirexError):
    """Invalid parameters or missing prerequisites for an operation."""


class JobError(MirexError):
    """A map/combine/reduce function failed while a job was running."""
