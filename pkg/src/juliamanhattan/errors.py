"""Exception hierarchy. ``exit_code`` is what the command line returns."""


class JuliaManhattanError(Exception):
    exit_code = 1


class NumericalFailure(JuliaManhattanError):
    exit_code = 3


class InvariantViolation(JuliaManhattanError):
    exit_code = 4


class UsageError(JuliaManhattanError, ValueError):
    exit_code = 2


class OrbitEscapedError(NumericalFailure):
    """An intermediate iterate left the escape disk."""


class DerivativeVanishedError(NumericalFailure):
    """The orbit hit the critical point, so the chain-rule product is zero."""


class CapExceededError(UsageError):
    """d**n - 1 is larger than the configured enumeration cap."""


class NonHyperbolicError(NumericalFailure):
    """Critical-orbit evidence says the map is not hyperbolic."""


class ContinuationError(NumericalFailure):
    def __init__(self, message, seed_index=None, parameter=None):
        super().__init__(message)
        self.seed_index = seed_index
        self.parameter = parameter


class CollisionError(NumericalFailure):
    def __init__(self, message, pairs=()):
        super().__init__(message)
        self.pairs = list(pairs)


class BracketError(NumericalFailure):
    """The function does not change sign on the initial bracket."""


class PeriodOutOfRangeError(UsageError):
    pass


class InsufficientDataError(NumericalFailure):
    pass


class UncertifiedThresholdError(UsageError):
    pass


class DatabaseFormatError(UsageError):
    """A database file is malformed or has an unknown format version."""
