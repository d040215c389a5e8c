"""Exception hierarchy shared across the package."""


class DimlabError(Exception):
    """Base class for all dimlab errors."""


class SizeError(DimlabError):
    """A point-count or allocation cap would be exceeded."""


class ScaleError(DimlabError):
    """A requested scale is invalid for the cloud (e.g. below its resolution)."""


class DiagnosticsError(DimlabError):
    """Inputs too thin to produce a meaningful estimate (e.g. grid too short)."""


class NumericError(DimlabError):
    """A numerical routine failed beyond recovery (e.g. Cholesky after max jitter)."""


class ConfigError(DimlabError):
    """Malformed configuration or CLI usage."""
