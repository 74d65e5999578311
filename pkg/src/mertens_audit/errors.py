"""Exception types shared across the package."""


class MertensAuditError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(MertensAuditError, ValueError):
    """An argument lies outside the domain of the function."""


class CapacityError(MertensAuditError):
    """A requested table or threshold exceeds the configured memory ceiling."""


class CorruptCacheError(MertensAuditError):
    """A cache file has a bad magic number, bad checksum, or is truncated."""
