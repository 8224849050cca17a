"""Exception types shared across the package.

The CLI maps these onto exit codes, so the distinction matters:
configuration and usage problems are the caller's fault, ingestion
problems are the data's fault, algorithm errors are degenerate states
discovered mid-computation.
"""


class BcforestError(Exception):
    """Base class for all package errors."""


class ConfigError(BcforestError, ValueError):
    """Invalid configuration: bad counts, unknown modes, missing settings."""


class UsageError(BcforestError, ValueError):
    """Invalid call arguments: wrong dimensions, empty samples, bad indices."""


class IngestionError(BcforestError, ValueError):
    """Input data cannot be parsed or is structurally unusable."""


class AlgorithmError(BcforestError, RuntimeError):
    """A computation reached a state with no defined result."""
