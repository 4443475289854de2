"""Exception hierarchy shared by every qbsf module."""


class QbsfError(Exception):
    """Base class for all errors raised by this package."""


# --- formulas and semantics -------------------------------------------------

class InconsistentArity(QbsfError):
    pass


class ArityMismatch(QbsfError):
    pass


class UnboundSymbol(QbsfError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class LimitExceeded(QbsfError):
    pass


class InvalidPath(QbsfError):
    pass


class CaptureDetected(QbsfError):
    pass


# --- concrete syntax --------------------------------------------------------

class ParseError(QbsfError):
    """Malformed input text; carries a 1-based line and column when known."""

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(where + message)


class UndeclaredVariable(ParseError):
    pass


class HeaderMismatch(ParseError):
    pass


# --- structural shape -------------------------------------------------------

class NotPrenex(QbsfError):
    pass


class NotSplittable(QbsfError):
    pass


class ShapeMismatch(QbsfError):
    """A transform was applied to a formula of the wrong shape."""


class NotCNF(ShapeMismatch):
    pass


class NotPropositionalPrefix(ShapeMismatch):
    pass


class QuantifierTypeMismatch(ShapeMismatch):
    pass


class NotAdjacent(ShapeMismatch):
    pass


class ArityShrink(ShapeMismatch):
    pass


class WidthTooSmall(ShapeMismatch):
    pass


class NotClosed(QbsfError):
    pass


# --- machines and tableaus --------------------------------------------------

class MachineError(QbsfError):
    pass


class Timeout(MachineError):
    pass


class InvalidIndex(MachineError):
    pass


class WindowOverflow(MachineError):
    pass


class OutOfRange(QbsfError):
    pass


class StateSpaceExceeded(QbsfError):
    pass


class WidthMismatch(QbsfError):
    pass
