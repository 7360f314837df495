"""Exception types shared across the package."""


class NumericalError(RuntimeError):
    """An iterative or factorization routine failed to meet its tolerance.

    Raised with a message carrying the achieved residual / iteration count so
    callers can report diagnostics.  Argument and contract violations raise
    plain :class:`ValueError` instead.
    """
