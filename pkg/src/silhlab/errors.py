"""Exception hierarchy. Every error raised on bad data derives from SilhlabError."""


class SilhlabError(ValueError):
    pass


class MeshError(SilhlabError):
    pass


class NonManifoldEdge(MeshError):
    pass


class InconsistentOrientation(MeshError):
    pass


class DegenerateFace(MeshError):
    pass


class NonTriangularFace(MeshError):
    pass


class ParseError(MeshError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ViewpointMismatch(SilhlabError):
    pass


class BoundaryEdge(SilhlabError):
    pass


class InvalidSampleCount(SilhlabError):
    pass


class InvalidSpec(SilhlabError):
    pass


class InsufficientReports(SilhlabError):
    pass


class NonPositiveExpectation(SilhlabError):
    pass


class MissingSilhouetteLength(SilhlabError):
    pass


class NumericalError(ArithmeticError):
    """Raised when a computation produced non-finite values."""
