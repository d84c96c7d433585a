"""Exception hierarchy shared by all lpkit modules."""


class LpkitError(Exception):
    """Base class for every error raised by lpkit."""


class InvalidArgument(LpkitError, ValueError):
    pass


class IncompatibleGrids(LpkitError, ValueError):
    pass


class CubeResolutionError(LpkitError, ValueError):
    """A dyadic cube or scale cannot be represented on the grid."""


class InvalidWeight(LpkitError, ValueError):
    pass


class DegenerateInput(LpkitError, ValueError):
    """A ratio was requested whose denominator vanishes."""


class ParameterDomainViolation(LpkitError, ValueError):
    pass


class IncompatibleWindows(LpkitError, ValueError):
    pass


class AtomConstructionFailure(LpkitError, RuntimeError):
    pass


class DecompositionFailure(LpkitError, RuntimeError):
    pass


class FormatError(LpkitError, ValueError):
    pass


class ConfigError(LpkitError, ValueError):
    pass
