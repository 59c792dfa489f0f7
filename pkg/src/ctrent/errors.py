"""Shared exception and warning types."""


class TraceCsvError(ValueError):
    """Malformed wide-CSV trace input (header, arity, or value errors)."""


class SourceSpecError(ValueError):
    """Invalid synthetic source specification."""


class UnsupportedPlatformError(RuntimeError):
    """The host exposes no readable counter facility."""


class DataWarning(UserWarning):
    """Non-fatal data-quality diagnostic (kept out of the error path)."""
