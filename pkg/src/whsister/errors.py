"""Exception hierarchy shared by the library and the command line."""


class WhsisterError(Exception):
    """Base class for all errors raised by this package."""


# algebra

class NotDivisible(WhsisterError, ArithmeticError):
    pass


class DivisionByZero(WhsisterError, ZeroDivisionError):
    pass


class ZeroPolynomial(WhsisterError, ValueError):
    pass


class PoleAtZero(WhsisterError, ZeroDivisionError):
    pass


class SchemaError(WhsisterError, ValueError):
    """Malformed polynomial or walk JSON."""


# farey

class SlopeError(WhsisterError, ValueError):
    """Base for slope-level user errors (exit code 2 on the command line)."""


class ZeroSlope(SlopeError):
    pass


class NotNeighbors(SlopeError):
    pass


class InitialVertex(SlopeError):
    pass


class DegenerateLST(SlopeError):
    pass


class ExcludedSlope(SlopeError):
    """A slope the pipeline refuses, with one or more reason classes.

    ``reasons`` is a tuple drawn from ``"non-hyperbolic"``,
    ``"degenerate"`` and ``"initial-vertex"``.
    """

    def __init__(self, slope, reasons, hint=None):
        self.slope = slope
        self.reasons = tuple(reasons)
        self.hint = hint
        msg = f"slope {slope} is excluded: {', '.join(self.reasons)}"
        if hint:
            msg += f" ({hint})"
        super().__init__(msg)

    @property
    def reason(self):
        return self.reasons[0]


class BasisUnavailable(SlopeError):
    pass


# ptolemy / eliminate / oracle

class ShapeMismatch(WhsisterError, ValueError):
    pass


class VerificationFailed(WhsisterError):
    pass


class ZeroOldGamma(WhsisterError, ZeroDivisionError):
    pass


class DegenerateWalk(SlopeError):
    pass


class BothConstant(WhsisterError, ValueError):
    pass


class EliminationCollapse(WhsisterError):
    pass


class TimeLimitExceeded(WhsisterError):
    """Raised when a pipeline passes its deadline; carries partial stats."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial or {}
