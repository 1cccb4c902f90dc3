"""Exception hierarchy shared by every layer of the package."""


class TotrefError(Exception):
    """Base class for all errors raised by totref."""


class DivisionByZero(TotrefError, ZeroDivisionError):
    pass


class FieldMismatch(TotrefError):
    pass


class ArityMismatch(TotrefError):
    pass


class ContextMismatch(TotrefError):
    pass


class UnknownVariable(TotrefError):
    pass


class ParseError(TotrefError):
    """Raised by the polynomial and series text parsers."""

    def __init__(self, message, pos=None):
        self.pos = pos
        if pos is not None:
            message = f"{message} (at offset {pos})"
        super().__init__(message)


class SizeOutOfRange(TotrefError):
    pass


class UnitIdeal(TotrefError):
    pass


class NotArtinian(TotrefError):
    def __init__(self, operation, detail=""):
        self.operation = operation
        msg = f"{operation}: ring is not artinian"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class NotLocal(TotrefError):
    pass


class CapExceeded(TotrefError):
    pass


class NotRegular(TotrefError):
    def __init__(self, form, witness):
        self.form = form
        self.witness = witness
        super().__init__(f"{form} is a zero-divisor; {witness} lies in (J : form) but not in J")


class StillPositiveDimensional(TotrefError):
    pass


class NotGraded(TotrefError):
    pass


class BoundTooSmall(TotrefError):
    pass


class HypothesisFailed(TotrefError):
    def __init__(self, hypothesis, witness=None):
        self.hypothesis = hypothesis
        self.witness = witness
        msg = f"hypothesis failed: {hypothesis}"
        if witness is not None:
            msg += f" (witness: {witness})"
        super().__init__(msg)


class PreconditionFailed(TotrefError):
    def __init__(self, what, witness=None):
        self.what = what
        self.witness = witness
        msg = what if witness is None else f"{what} (witness: {witness})"
        super().__init__(msg)


class SpecInvalid(TotrefError):
    pass


class MalformedExpression(TotrefError):
    pass


class NonUnitDivision(TotrefError):
    pass


class ScriptError(TotrefError):
    """Base class for DSL errors; carries a source position."""

    def __init__(self, message, line=None, col=None):
        self.line, self.col = line, col
        if line is not None:
            message = f"line {line}, col {col}: {message}"
        super().__init__(message)


class ScriptSyntaxError(ScriptError):
    def __init__(self, message, line, col, expected=()):
        self.expected = tuple(expected)
        if self.expected:
            message = f"{message}; expected one of: {', '.join(self.expected)}"
        super().__init__(message, line, col)


class UndefinedName(ScriptError):
    pass


class Redefinition(ScriptError):
    pass
