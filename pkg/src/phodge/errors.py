"""Exception types shared across the package."""


class PhodgeError(Exception):
    pass


class ValidationError(PhodgeError):
    """An object violates a structural invariant (exit code 2 in the CLI)."""


class PreconditionError(PhodgeError):
    """An operation was invoked without a required precondition (exit code 3)."""
