"""Exception hierarchy shared by all dec2d modules."""


class Dec2dError(Exception):
    """Base class for every error raised by dec2d."""


class MeshError(Dec2dError, ValueError):
    pass


class NonManifold(MeshError):
    pass


class DegenerateTriangle(MeshError):
    pass


class DuplicateTriangle(MeshError):
    pass


class InvalidDegree(Dec2dError, ValueError):
    pass


class DegreeMismatch(Dec2dError, ValueError):
    pass


class QuadratureFailure(Dec2dError, ArithmeticError):
    pass


class OutOfTriangle(Dec2dError, ValueError):
    pass


class AllCollinear(MeshError):
    pass


class ConstraintViolation(MeshError):
    """A boundary polygon edge is missing from a triangulation."""


class ParseError(Dec2dError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnsupportedFormat(Dec2dError, ValueError):
    pass


class SpecInvalid(Dec2dError, ValueError):
    pass


class EigenFailure(Dec2dError, ArithmeticError):
    pass


class NotClosed(Dec2dError, ValueError):
    pass


class EmptyComplement(Dec2dError, ValueError):
    pass


class SingularSystem(Dec2dError, ArithmeticError):
    pass


class MissingHarmonicBasis(Dec2dError, ValueError):
    pass


class UnknownStudy(Dec2dError, ValueError):
    pass


class ConfigError(Dec2dError, ValueError):
    pass


class AdmissibilityError(Dec2dError):
    """A mesh or family violates a geometric condition an operation requires.

    The CLI maps these to exit code 2.
    """


class IndefiniteStar(AdmissibilityError):
    pass


class FamilyNotDECRegular(AdmissibilityError):
    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = violations or {}


class SolveFailure(Dec2dError):
    def __init__(self, message, level=None):
        if level is not None:
            message = f"level {level}: {message}"
        super().__init__(message)
        self.level = level


class IndefiniteStarWarning(UserWarning):
    """A DEC Hodge star used in a bilinear form is not positive definite."""
