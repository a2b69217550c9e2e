"""Exception hierarchy shared by every module of the package.

All errors raised by this package derive from :class:`LhvError`, so callers
can catch one base class.  The subclasses separate *structural* problems
(wrong shapes, mismatched index sets), *invariant* violations (a state that
is not normalized, a POVM that does not resolve the identity), *domain*
errors (parameters outside the range where a quantity is defined), and a few
situation-specific failures used by the model builders and samplers.
"""

from __future__ import annotations


class LhvError(Exception):
    """Base class for every error raised by this package."""


class StructuralError(LhvError):
    """Shapes or index sets are inconsistent (e.g. non-square matrix,
    mismatched dimensions, distributions over different outcome sets).

    Distinct from :class:`InvariantViolation`: a structurally broken input
    cannot even be tested against the mathematical invariants.
    """


class InvariantViolation(LhvError):
    """A well-formed object fails one of its defining invariants
    (normalization, positivity, completeness, ...)."""


class DomainError(LhvError, ValueError):
    """A parameter lies outside the domain where the requested quantity
    is defined (e.g. both parties with a single setting, eta > 1)."""


class ConsistencyError(LhvError):
    """An internal cross-check that must hold identically has failed.

    This always signals an arithmetic bug in the package, never a property
    of valid inputs.
    """


class SizeGuardExceeded(LhvError):
    """An exact tabulation was refused because the table would be too large."""


class ZeroFiringError(LhvError):
    """A Monte Carlo run produced no firing events, so conditional
    statistics are undefined (threshold too strict for the sample budget)."""


class ScenarioFormatError(LhvError):
    """A scenario file or JSON object does not follow the documented schema."""
