"""
Exception hierarchy for the identifiability toolkit.
Every failure the library signals on purpose derives from NetidentError, so the CLI
can report it with a single handler and exit code 1.
"""


class NetidentError(Exception):
    """Base class for all toolkit errors"""


class ConfigError(NetidentError):
    """config.yaml could not be read or failed validation"""


class GraphSyntaxError(NetidentError):
    """Malformed JSON/DOT graph text or fixture payload"""


class LiteralSyntaxError(NetidentError):
    """Malformed rational-function literal such as "(2*z+1)/(z^2-3)" """


class InvariantError(NetidentError):
    """A structural invariant was violated (self-loop, out-of-range vertex, overlapping paths, ...)"""


class CapExceeded(NetidentError):
    """Path-set enumeration found more sets than the configured cap"""

    def __init__(self, cap: int):
        super().__init__(f"more than {cap} vertex-disjoint path sets; instance too large for exact uniqueness testing")
        self.cap = cap


class SizeLimitExceeded(NetidentError):
    """An exhaustive procedure was asked to run above max_exact_n"""

    def __init__(self, size: int, limit: int):
        super().__init__(f"size {size} exceeds max_exact_n={limit}")
        self.size = size
        self.limit = limit


class DivisionByZero(NetidentError, ZeroDivisionError):
    """Division by the zero rational function, or evaluation at a pole"""


class SingularMatrix(NetidentError):
    """Matrix determinant is identically zero"""


class ImproperEntry(NetidentError):
    """A rational function has numerator degree above its denominator degree"""


class DegreeOverflow(NetidentError):
    """A polynomial exceeded the degree cap"""


class PreconditionError(NetidentError):
    """Operation called outside its documented precondition"""
