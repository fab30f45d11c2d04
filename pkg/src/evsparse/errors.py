"""Exception hierarchy and process exit codes."""


class EvsparseError(Exception):
    """Base class for all toolkit errors."""

    exit_code = 1


class ValidationError(EvsparseError):
    """Malformed input: bad dimensions, non-finite values, schema mismatch."""

    exit_code = 1


class NumericalGuardError(EvsparseError):
    """A numerical safety guard fired (overflow budget, total conflict)."""

    exit_code = 2


EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3
