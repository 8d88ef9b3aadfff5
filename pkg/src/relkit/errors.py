"""Exception types shared across the package."""


class RelkitError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(RelkitError):
    """Invalid specification, model, or argument structure."""


class DomainError(RelkitError):
    """A value lies outside the declared parameter space."""


class ConfigError(RelkitError):
    """Malformed or incomplete configuration document."""


class NumericalError(RelkitError):
    """A numerical routine failed or the evidence degenerated."""
