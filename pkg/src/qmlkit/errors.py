"""Exception types shared across the toolkit."""


class DomainError(ValueError):
    """Raised when an operation receives arguments outside its domain
    (dimension mismatch, index out of range, invalid probability vector, ...)."""


class ConfigError(DomainError):
    """Raised when a configured limit is exceeded (e.g. the qubit cap)."""
