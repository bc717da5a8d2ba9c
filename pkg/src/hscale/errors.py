"""Exception hierarchy for hscale."""


class HScaleError(Exception):
    """Base class for every error raised by this package."""


class CycleError(HScaleError):
    pass


class UnknownLabel(HScaleError, KeyError):
    pass


class NotDirected(HScaleError):
    pass


class NotComparable(HScaleError):
    pass


class DimMismatch(HScaleError, ValueError):
    pass


class SingularGram(HScaleError):
    pass


class NotHermitian(HScaleError, ValueError):
    pass


class NotPSD(HScaleError, ValueError):
    pass


class OrderViolation(HScaleError):
    pass


class IndexMismatch(HScaleError):
    pass


class DimOrderViolation(HScaleError, ValueError):
    pass


class NotInjective(HScaleError):
    """A projection Pi_alpha has a kernel, so D does not embed in H_alpha."""


class ConditionAViolation(HScaleError):
    """Some nonzero coherent family has vanishing infimum norm."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ParallelogramViolation(HScaleError):
    """The infimum norm is not Hilbertian for this system."""

    def __init__(self, violation, witness):
        super().__init__(f"parallelogram law violated by {violation:.6g}")
        self.violation = violation
        self.witness = witness


class SchemaError(HScaleError, ValueError):
    """Malformed system file; ``path`` locates the offending node."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
