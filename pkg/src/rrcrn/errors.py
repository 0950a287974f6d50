"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class CRNError(Exception):
    """Base class for all errors raised by rrcrn."""


class ValidationError(CRNError):
    """A CRN or device violates a structural constraint."""


class NotApplicable(CRNError):
    def __init__(self, rxn: int, direction) -> None:
        self.rxn = rxn
        self.direction = direction
        super().__init__(f"reaction {rxn} is not applicable in direction {direction.value}")


class CapUnreasonable(CRNError):
    """The start configuration already exceeds the exploration bound."""


class NotAMember(CRNError):
    """Witness requested for a configuration outside the explored set."""


class ReplayFailure(CRNError):
    def __init__(self, step: int, reason: str) -> None:
        self.step = step
        self.reason = reason
        super().__init__(f"replay failed at step {step}: {reason}")


class CommutationBlocked(CRNError):
    """The disjointness hypothesis for swapping two adjacent steps does not hold."""


class NotAnInversePair(CRNError):
    pass


class PreconditionViolated(CRNError):
    pass


class PairingFailed(CRNError):
    def __init__(self, message: str, execution=None) -> None:
        self.execution = execution
        super().__init__(message)


class BadModulus(CRNError):
    pass


class ArityMismatch(CRNError):
    pass


class DomainError(CRNError):
    """Semilinear piece domains overlap, leave a gap, or give a non-integral value."""


class ParseError(CRNError):
    def __init__(self, line: int, message: str) -> None:
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}")
