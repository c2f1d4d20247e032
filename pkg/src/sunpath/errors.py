"""Exception hierarchy shared across the package.

Every error family maps to a distinct CLI exit code (see cli.EXIT_CODES).
"""

from __future__ import annotations


class SunpathError(Exception):
    """Base class for all package errors."""


class InvalidParams(SunpathError):
    """Raised by parameter validation; carries every violated constraint.

    ``violations`` is a list of short codes such as ``"EvenDegree"`` or
    ``"TreeCountNotMultipleOf4"``.
    """

    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("invalid parameters: " + ", ".join(self.violations))


class ExplicitTooLarge(SunpathError):
    """Materialization cap (10^7 vertices) exceeded for the explicit backend."""


class ImplicitBackendUnsupported(SunpathError):
    """Operation needs materialized adjacency; build with backend='explicit'."""


class ExhaustiveTooLarge(SunpathError):
    """Exhaustive bipartite check limited to N <= 20 per side."""


class SingularMatrix(SunpathError):
    """Tridiagonal system is singular (boundary weight a = 0)."""


class NonpositiveGap(SunpathError):
    """Filter degree selection requires a strictly positive spectral gap."""


class DegenerateDistribution(SunpathError):
    """Sample-count selection requires positive mass on every odd root."""


class DomainError(SunpathError):
    """Argument outside the mathematical domain of a numeric routine."""


class ArtifactNotFound(SunpathError):
    """A required input artifact file does not exist."""
