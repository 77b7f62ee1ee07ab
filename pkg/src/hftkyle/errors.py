"""Exception types shared across the package."""


class HftKyleError(Exception):
    """Base class for all package-specific errors."""


class DegenerateDenominator(HftKyleError):
    """A closed-form coefficient formula was evaluated at a vanishing denominator."""


class NegativeRadicand(HftKyleError):
    """The clearing-intensity consistency radicand went negative (inconsistent inputs)."""


class NoRoot(HftKyleError):
    """No multistart point converged to a root of the equilibrium system."""


class OnlySOCViolating(HftKyleError):
    """Roots were found, but every one of them violates a second-order condition."""


class BracketFailure(HftKyleError):
    """A scalar root could not be bracketed with the expected signs."""


class PredicateMonotoneViolation(HftKyleError):
    """An existence predicate expected to switch once along a grid switched more than once."""


class BoundaryNotBracketed(HftKyleError):
    """A sign change expected inside a grid was not found (threshold is open)."""


class NoConvergence(HftKyleError):
    """A damped fixed-point iteration did not reach the step tolerance."""


class PDViolation(HftKyleError):
    """A matrix second-order condition (positive definiteness) failed at the fixed point."""


class NotBestResponse(HftKyleError):
    """A strategy deviation improved its objective beyond statistical noise."""
