"""Exception hierarchy shared by all modules.

Each class carries the process exit code the command line front end uses
when the error escapes a command.
"""


class SIISError(Exception):
    exit_code = 1


class ValidationError(SIISError, ValueError):
    """Bad parameter or input that violates a precondition."""

    exit_code = 2


class InvalidLabelError(ValidationError):
    pass


class DegenerateGraphError(ValidationError):
    pass


class NumericalError(SIISError, ArithmeticError):
    """A linear system or factorization could not be solved reliably."""

    exit_code = 3


class EigensolverError(NumericalError):
    pass


class DataIOError(SIISError, OSError):
    exit_code = 4
