"""Exception types shared across the package."""


class InvalidMarketError(ValueError):
    """Market data violates a precondition (nonpositive budget, negative
    utility, nothing left after preprocessing, ...)."""


class FormatError(ValueError):
    """Malformed instance/equilibrium/trace document."""


class InvariantError(RuntimeError):
    """An internal invariant or guard tripped.  This signals an
    implementation bug, not a bad input."""


class ConvergenceError(RuntimeError):
    """The numeric oracle did not converge within its iteration budget."""
