"""Exception types shared across the package.

The CLI maps these onto exit codes: bad input (anything deriving from
UserInputError, plus the domain errors below) exits 2, numerical or internal
failures exit 1.
"""


class CasimirError(Exception):
    """Base class for all errors raised by this package."""


class UserInputError(CasimirError, ValueError):
    """Invalid configuration, flag or parameter value."""


class ModeIndexError(CasimirError, IndexError):
    """Mode index outside the valid range (1-based, bounded by truncation)."""


class PositionDomainError(CasimirError, ValueError):
    """Position argument outside the cavity interior [0, L]."""


class ResonanceUndefinedError(CasimirError, ValueError):
    """Resonant closed forms were requested for a non-integer drive ratio."""


class MatchingDomainError(CasimirError, ValueError):
    """Stop time does not return the wall to its rest position."""


class IntegrationError(CasimirError, RuntimeError):
    """Time integration failed (step limit, tolerance failure, ...)."""


class NonFiniteStateError(IntegrationError):
    """A state acquired NaN or Inf entries; the integration is aborted."""
