"""Exception types shared across the package."""


class InvalidArgument(ValueError):
    """An argument lies outside the documented domain."""


class TerminalStateError(InvalidArgument):
    """A transition was requested out of the final interview."""


class NumericFailure(ArithmeticError):
    """A numerical routine failed to meet its tolerance."""


class EnumerationLimitError(RuntimeError):
    """Exhaustive enumeration was requested above the configured size cap."""
