"""Exception types shared across the toolkit."""


class IpoRlError(Exception):
    """Base class for all toolkit errors."""


class ShapeError(IpoRlError):
    """Tensor dimensions are incompatible with the requested operation."""


class DomainError(IpoRlError):
    """An input lies outside an operation's mathematical domain."""


class ConfigError(IpoRlError):
    """Invalid configuration value or unknown configuration key."""


class ContractError(IpoRlError):
    """An API precondition was violated by the caller."""


class TrainingAbort(IpoRlError):
    """Training produced a non-finite loss; carries a diagnostic payload."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
