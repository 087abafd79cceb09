"""Exception hierarchy shared by all momentkit modules."""

from __future__ import annotations


class MomentKitError(Exception):
    """Base class for all toolkit errors."""


class VariableCountError(MomentKitError, ValueError):
    pass


class ParseError(MomentKitError, ValueError):
    pass


class DegreeOverflowError(MomentKitError):
    """An operation needs moments beyond the stored truncation degree."""

    def __init__(self, required: int, available: int, what: str = ""):
        self.required = required
        self.available = available
        msg = f"degree overflow: need degree {required}, moments available to degree {available}"
        if what:
            msg = f"{what}: {msg}"
        super().__init__(msg)


class NormalizationError(MomentKitError, ValueError):
    """L(1) != 1 and no explicit normalization was requested."""


class NotAMomentSequenceError(MomentKitError, ValueError):
    """Data violates a necessary condition for being a moment sequence."""


class RankDetectionError(MomentKitError):
    pass


class RecoveryError(MomentKitError):
    pass


class SolverError(MomentKitError):
    """Simplex iteration cap hit or numerical breakdown."""


class CombinatorialOverflowError(MomentKitError):
    pass


class CertificateError(MomentKitError):
    """A certificate candidate failed re-expansion."""
