"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes, so new error types should
subclass one of the categories below rather than raising bare ValueError
from library code.
"""


class StealthKemError(Exception):
    """Base class for all library errors."""


class BadInputError(StealthKemError):
    """Caller-supplied value is malformed or out of range."""


class InvalidModulusError(BadInputError):
    pass


class InvalidParameterError(BadInputError):
    pass


class InsufficientEntropyError(StealthKemError):
    """A deterministic bit source ran out before the sampler finished."""


class InvalidPointError(BadInputError):
    """Byte string or coordinate pair is not a valid curve point."""


class KemFormatError(BadInputError):
    """Key or ciphertext bytes have the wrong length for the parameter set."""


class UnsupportedParameterError(BadInputError):
    """A recognized configuration value that this build cannot service."""


class NotFoundError(StealthKemError):
    """Lookup target does not exist."""


class ConflictError(StealthKemError):
    """Write refused because the target already exists."""


class IntegrityError(StealthKemError):
    """Stored data fails its integrity check (CRC or commitment hash)."""

    def __init__(self, message: str, sequence_no: int | None = None):
        super().__init__(message)
        self.sequence_no = sequence_no


class ConfigError(BadInputError):
    """Benchmark or CLI configuration is invalid."""
