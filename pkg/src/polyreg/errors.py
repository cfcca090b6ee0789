"""Exception hierarchy shared by every module."""

from __future__ import annotations


class PolyregError(Exception):
    """Base class for all toolkit errors."""


class ParseError(PolyregError):
    """Malformed text input. Carries an optional 1-based line/column."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)


class ValidationError(PolyregError):
    """A model violates a structural invariant."""

    def __init__(self, message: str, index: int | None = None):
        self.index = index
        self.message = message
        super().__init__(message if index is None else f"stage {index}: {message}")


class AlphabetMismatch(ValidationError):
    """A word or automaton uses symbols outside the expected alphabet."""


class RejectedInput(PolyregError):
    """A pebble transducer has no accepting run on the input."""


class TypeCheckError(PolyregError):
    """An ill-typed list-calculus term. ``path`` locates the offending subterm."""

    def __init__(self, message: str, path: tuple[int, ...] = ()):
        self.path = tuple(path)
        self.message = message
        super().__init__(f"{message} (at {list(self.path)})")


class NotNormalForm(PolyregError):
    """A term expected to be a value still contains redexes or free variables."""


class CapExceeded(PolyregError):
    """A safety bound (normalization steps, semigroup size, ...) was exceeded."""
