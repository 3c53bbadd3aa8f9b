"""Exception types raised across the package."""


class DPDEError(Exception):
    """Base class for all package errors."""


class NonPositiveRadius(DPDEError):
    """The radius reached zero or became negative at some node."""

    def __init__(self, message, t=None, theta=None):
        super().__init__(message)
        self.t = t
        self.theta = theta


class UnstableStep(DPDEError):
    pass


class ConfigError(DPDEError):
    """Invalid configuration. ``line`` and ``key`` locate the problem when known."""

    def __init__(self, message, line=None, key=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
        self.key = key


class SeriesDivergence(DPDEError):
    pass


class SimulationFailure(DPDEError):
    def __init__(self, message, knots=None):
        super().__init__(message)
        self.knots = knots


class NoDescent(DPDEError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class MismatchedGrids(DPDEError):
    pass


class DegenerateBoundaryRadius(DPDEError):
    pass


class MissingSnapshot(DPDEError):
    pass
