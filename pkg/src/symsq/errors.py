"""Exception hierarchy shared by all symsq modules."""


class SymsqError(Exception):
    """Base class for all errors raised by symsq."""


class CapacityError(SymsqError):
    """A requested limit exceeds what the table or configuration allows."""


class DomainError(SymsqError, ValueError):
    """An argument is outside the mathematical domain of the operation."""


class ParseError(SymsqError):
    """A q-expansion file is malformed; carries the offending line number."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class ValidationError(SymsqError):
    """Parsed data violates a structural invariant (e.g. a(1) != 1)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DegenerateAngleError(DomainError):
    """The Chebyshev-angle identity is evaluated at a removable singularity."""


class ResolutionError(SymsqError):
    """Integrator step size is too coarse for the shortest delay."""


class FitError(SymsqError):
    """Exponent fit attempted on a degenerate series."""
