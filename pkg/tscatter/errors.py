"""Exceptions raised by the package.

All exceptions derive from :class:`TScatterError` and carry a short machine-readable
:attr:`~TScatterError.code`, which the command line interface reports.

.. autosummary::
   :nosignatures:

   TScatterError
   NotPositiveDefinite
   DomainError
   DimensionError
   ConfigError
   ExplicitLimitation
   ConvergenceFailure
   DomainViolation
   NoConvergence
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Any

if TYPE_CHECKING:
    from .domain import DomainReport
    from .solver import SolveReport

__all__ = [
    "TScatterError",
    "NotPositiveDefinite",
    "DomainError",
    "DimensionError",
    "ConfigError",
    "ExplicitLimitation",
    "ConvergenceFailure",
    "DomainViolation",
    "NoConvergence",
]


class TScatterError(Exception):
    """Base class of all errors raised by the package."""

    code: str = "error"

    def to_dict(self) -> dict[str, Any]:
        """Machine-readable representation of the error."""
        return {"code": self.code, "message": str(self)}


class NotPositiveDefinite(TScatterError, ValueError):
    """A matrix failed the Cholesky pivot test."""

    code = "not_positive_definite"


class DomainError(TScatterError, ValueError):
    """An argument lies outside the domain of a scalar function."""

    code = "domain_error"


class DimensionError(TScatterError, ValueError):
    """Dimensions of the arguments do not match."""

    code = "dimension_error"


class ConfigError(TScatterError, ValueError):
    """The configuration does not permit the requested computation."""

    code = "config_error"


class ExplicitLimitation(TScatterError, RuntimeError):
    """The exact algorithm would exceed its documented complexity cap."""

    code = "explicit_limitation"


class ConvergenceFailure(TScatterError, RuntimeError):
    """A linear algebra routine did not converge."""

    code = "convergence_failure"


class DomainViolation(TScatterError):
    """The law lies outside the existence domain of the functional.

    Args:
        message (str):
            Human readable description
        report (:class:`~tscatter.domain.DomainReport`, optional):
            The membership evidence including the extremal witnesses
    """

    code = "domain_violation"

    def __init__(self, message: str, report: DomainReport | None = None):
        super().__init__(message)
        self.report = report

    @property
    def witness(self) -> list[int] | None:
        """list: point indices spanning the first violated subspace"""
        if self.report is None:
            return None
        violations = self.report.violations
        return list(violations[0].witness) if violations else None

    def to_dict(self) -> dict[str, Any]:
        data = super().to_dict()
        if self.witness is not None:
            data["witness"] = self.witness
        return data


class NoConvergence(TScatterError):
    """The fixed-point iteration did not reach a critical point.

    Args:
        message (str):
            Human readable description
        report (:class:`~tscatter.solver.SolveReport`, optional):
            The solver trace, which helps diagnosing divergence
    """

    code = "no_convergence"

    def __init__(self, message: str, report: SolveReport | None = None):
        super().__init__(message)
        self.report = report
