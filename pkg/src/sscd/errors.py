"""Exception types raised across the package."""


class SSCDError(Exception):
    """Base class for all package errors."""


class IncompleteLabels(SSCDError, ValueError):
    pass


class ConstantVariable(SSCDError, ValueError):
    """A column has fewer than two distinct values."""

    def __init__(self, names):
        self.names = list(names)
        super().__init__("constant variable(s): " + ", ".join(map(str, self.names)))


class GridError(SSCDError, ValueError):
    pass


class EmptyData(SSCDError, ValueError):
    pass


class KindError(SSCDError, ValueError):
    pass


class ParamError(SSCDError, ValueError):
    pass


class DegreeError(SSCDError, ValueError):
    pass


class NoLabels(SSCDError, ValueError):
    pass


class SolveError(SSCDError, RuntimeError):
    pass


class CvError(SSCDError, ValueError):
    pass


class CycleError(SSCDError, ValueError):
    pass


class DegenerateVariable(SSCDError, ValueError):
    """Observational IQR is zero for one or more variables."""

    def __init__(self, indices):
        self.indices = list(indices)
        super().__init__(f"zero interquartile range for variable(s) {self.indices}")


class ClassError(SSCDError, ValueError):
    pass


class DataError(SSCDError, ValueError):
    """Malformed or non-finite input data."""
