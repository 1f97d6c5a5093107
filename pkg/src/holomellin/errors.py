"""Exception hierarchy.

Everything raised on purpose by the library derives from ``HolomellinError`` so
the command line front end can map it to exit code 1.
"""


class HolomellinError(Exception):
    pass


class VariableMismatchError(HolomellinError, ValueError):
    pass


class ZeroOperatorError(HolomellinError, ValueError):
    pass


class InvariantViolation(HolomellinError, RuntimeError):
    """An internal algebraic invariant failed; indicates a bug, never bad input."""


class UnsupportedInputError(HolomellinError, ValueError):
    pass


class MissingBoundaryValueError(HolomellinError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class SingularIndexError(HolomellinError, ValueError):
    def __init__(self, index):
        self.index = index
        super().__init__(
            f"singular index {index}: the leading recurrence coefficient "
            f"vanishes there, supply f_{index} as an initial coefficient"
        )


class OracleError(HolomellinError, ArithmeticError):
    pass


class ParseError(HolomellinError, ValueError):
    def __init__(self, message, text="", pos=0):
        self.message = message
        self.text = text
        self.pos = pos
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        self.line = line
        self.column = col
        super().__init__(f"line {line}, column {col}: {message}")


class MixedOperatorError(ParseError):
    pass
