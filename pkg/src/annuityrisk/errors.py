"""Exception hierarchy shared by all annuityrisk modules."""


class AnnuityRiskError(Exception):
    """Base class for all errors raised by this package."""


class InputError(AnnuityRiskError, ValueError):
    """A caller-supplied value is invalid (nonpositive amount, bad grid, ...)."""


class ParseError(InputError):
    """A life-table stream could not be parsed; message names the offending row."""


class NumericalError(AnnuityRiskError, ArithmeticError):
    """A numerical procedure failed (overflow, quadrature non-convergence)."""


class DomainError(NumericalError):
    """A formula left its numeric domain (exp overflow for extreme sigma^2 T)."""


class InversionError(NumericalError):
    """Implied-volatility search found no admissible solution on the bracket."""


class SimulationError(NumericalError):
    """A Monte Carlo path produced a non-finite value; message names the step."""
