"""Exception hierarchy."""


class SymtestError(Exception):
    pass


class DimensionMismatch(SymtestError, ValueError):
    pass


class NotHermitian(SymtestError, ValueError):
    pass


class NotUnitary(SymtestError, ValueError):
    pass


class EigendecompositionFailure(SymtestError, RuntimeError):
    pass


class ConvergenceFailure(SymtestError, RuntimeError):
    pass


class BadWordLength(SymtestError, ValueError):
    pass


class NonRealCoefficient(SymtestError, ValueError):
    pass


class ExplicitMatrixUnsupported(SymtestError, ValueError):
    pass


class ClosureExceeded(SymtestError, RuntimeError):
    pass


class NonRealProbability(SymtestError, ArithmeticError):
    pass


class UnnormalizedState(SymtestError, ValueError):
    pass


class BadParameterCount(SymtestError, ValueError):
    pass


class BoundViolation(SymtestError, AssertionError):
    """A proven inequality failed numerically; indicates a bug, not bad input."""


class ConfigError(SymtestError):
    pass


class ParseError(ConfigError):
    def __init__(self, message, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.field = field


class ValidationError(ConfigError):
    def __init__(self, message, invariant=None):
        super().__init__(f"{invariant}: {message}" if invariant else message)
        self.invariant = invariant
