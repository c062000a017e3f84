"""Exceptions shared across the package."""


class ResourceLimitError(RuntimeError):
    """A size/memory guard was exceeded (dense paths, Hilbert-space caps)."""


class NumericGuardError(RuntimeError):
    """A numerical precondition failed (too few levels, degenerate input)."""
