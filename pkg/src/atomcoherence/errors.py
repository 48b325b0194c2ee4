"""Exception hierarchy.

Two families matter to callers: :class:`ValidationError` for bad inputs
(the CLI maps these to exit code 2) and :class:`NumericalError` for failures
that arise while computing (exit code 3).
"""


class AtomCoherenceError(Exception):
    """Base class for all package errors."""


class ValidationError(AtomCoherenceError, ValueError):
    """Inputs violate a documented invariant or precondition."""


class NumericalError(AtomCoherenceError, ArithmeticError):
    """A computation could not produce a trustworthy number."""


class NonPhysical(NumericalError):
    """A computed population came out negative beyond tolerance."""


class SingularDenominator(NumericalError):
    """A closed-form denominator vanished within tolerance."""


class SingularSystem(NumericalError):
    """The assembled linear system is numerically singular."""


class UndefinedNormalization(NumericalError, ZeroDivisionError):
    """A normalizing population difference is exactly zero."""


class GridTooNarrow(NumericalError):
    """The integrand has not decayed at the edges of the grid."""


class QuadratureNotConverged(NumericalError):
    """Node doubling kept changing the result beyond tolerance."""


class PVNotConverged(QuadratureNotConverged):
    """Principal-value quadrature failed the grid-doubling test."""


class ConvergenceError(NumericalError):
    """A fixed-point iteration did not converge."""


class ZeroWidth(NumericalError):
    """A Fano parameter was requested for a vanishing width."""


class LorentzCatastrophe(NumericalError):
    """The Clausius-Mossotti denominator vanished."""


class Infeasible(NumericalError):
    """No candidate point satisfies the optimisation constraint."""


class RegimeViolation(ValidationError):
    """A simplified formula was requested outside its validity regime."""


class DegenerateGeometry(ValidationError):
    """Wave-number geometry makes the requested limit undefined."""


class ConfigError(ValidationError):
    """A configuration file is malformed or incomplete."""


class MissingColumns(ValidationError):
    """A result file lacks the columns needed for plotting."""
