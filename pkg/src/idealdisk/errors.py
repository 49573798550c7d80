"""Exception hierarchy shared by every module of the package."""


class IdealDiskError(Exception):
    """Base class for all package errors."""

    code = "IdealDiskError"

    def __init__(self, message="", **details):
        super().__init__(message)
        self.details = details

    def to_dict(self):
        out = {"error": self.code, "message": str(self)}
        if self.details:
            out["details"] = self.details
        return out


class InputError(IdealDiskError, ValueError):
    """Malformed input data (bad indices, wrong lengths, bad JSON documents)."""

    code = "InputError"


class DuplicateGluing(InputError):
    code = "DuplicateGluing"


class DanglingSide(InputError):
    code = "DanglingSide"


class NonManifold(InputError):
    code = "NonManifold"


class UnknownVertex(InputError, KeyError):
    code = "UnknownVertex"

    # KeyError.__str__ would repr() the message
    __str__ = Exception.__str__


class EdgeNotInTriangle(InputError):
    code = "EdgeNotInTriangle"


class WrongLength(InputError):
    code = "WrongLength"


class DomainError(IdealDiskError, ValueError):
    """Angle data outside the domain where a formula is defined."""

    code = "DomainError"


class CrossCheckFailure(IdealDiskError, ArithmeticError):
    code = "CrossCheckFailure"


class BasisVerificationFailed(IdealDiskError, ArithmeticError):
    code = "BasisVerificationFailed"


class NotInN(IdealDiskError, ValueError):
    """The angle vector is not a (strict) angle system."""

    code = "NotInN"


class MaxIterExceeded(IdealDiskError, RuntimeError):
    code = "MaxIterExceeded"


class SolverStalled(MaxIterExceeded):
    """The line search could not make progress before the tolerance was met."""

    code = "SolverStalled"


class TooLarge(IdealDiskError, ValueError):
    code = "TooLarge"


class NegativeTheta(IdealDiskError, ValueError):
    code = "NegativeTheta"


class InfeasiblePattern(IdealDiskError, ValueError):
    code = "InfeasiblePattern"

    def __init__(self, message="", certificate=None, **details):
        super().__init__(message, **details)
        self.certificate = certificate

    def to_dict(self):
        out = super().to_dict()
        if self.certificate is not None:
            out["certificate"] = self.certificate.to_dict()
        return out


class Phase2Failure(IdealDiskError, RuntimeError):
    code = "Phase2Failure"


class NotConverged(IdealDiskError, ValueError):
    code = "NotConverged"


class CircumcircleDegenerate(IdealDiskError, ArithmeticError):
    code = "CircumcircleDegenerate"
