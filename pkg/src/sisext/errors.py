"""Exception hierarchy.

Input problems derive from :class:`InputError` (CLI exit code 1); numerical
failures derive from :class:`NumericalError` (CLI exit code 2).
"""

from __future__ import annotations


class SisextError(Exception):
    """Base class for all package errors."""


class InputError(SisextError):
    pass


class SchemaError(InputError):
    """Malformed JSON or a document that does not match the schema."""


class ValidationError(InputError):
    """Well-formed document whose values violate a model invariant."""


class NumericalError(SisextError):
    pass


class ToleranceNotMet(NumericalError):
    pass


class EnvelopeViolation(NumericalError):
    """Sampled |f| exceeded the declared envelope outside its window."""


class DivergentEnvelope(NumericalError):
    """The weighted envelope is not integrable."""


class DegenerateInput(NumericalError):
    pass


class AliasingSuspected(NumericalError):
    pass


class OverflowGuard(NumericalError):
    pass


class NearPole(NumericalError):
    def __init__(self, pole: complex, distance: float):
        super().__init__(f"evaluation point within {distance:.3g} of pole {pole!r}")
        self.pole = pole
        self.distance = distance


class EmptySpec(NumericalError):
    pass


class DivergentWeighting(NumericalError):
    """The exponentially weighted coefficient sum diverges."""


class MembershipError(NumericalError):
    """A candidate function failed a space-membership test."""


class NotPeriodic(MembershipError):
    pass


class NotSummable(MembershipError):
    pass


class ResynthesisMismatch(MembershipError):
    pass


class ResidueMismatch(MembershipError):
    pass


class MidlineLambda(NumericalError):
    pass


class DivergentSide(NumericalError):
    pass


class MembershipFailed(NumericalError):
    pass


class EpsilonUnderflow(NumericalError):
    pass


class ContourTooClose(UserWarning):
    """Residue contour radius had to be shrunk below the default."""
