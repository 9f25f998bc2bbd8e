"""Exception hierarchy shared by every sketchkit module."""

from __future__ import annotations


class SketchkitError(Exception):
    """Base class for all library errors."""


class ResolutionError(SketchkitError):
    """A name does not resolve to a declared vertex, edge, object or declaration."""

    def __init__(self, messages):
        if isinstance(messages, str):
            messages = [messages]
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))


class PreconditionError(SketchkitError):
    """An operation was called on inputs that violate its precondition."""


class BudgetExceeded(SketchkitError):
    """A search visited more candidates than its budget allows."""

    def __init__(self, what: str, budget: int):
        self.what = what
        self.budget = budget
        super().__init__(f"{what}: search budget of {budget} candidates exceeded")


class CapExceeded(BudgetExceeded):
    """The functorial-verification search exhausted its section cap."""


class NotInvertible(SketchkitError):
    """A natural transformation expected to be an isomorphism is not."""


class ParseError(SketchkitError):
    """Syntax error with a 1-based line/column and the set of expected tokens."""

    def __init__(self, message: str, line: int, column: int, expected=()):
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        self.message = message
        text = f"line {line}, column {column}: {message}"
        if self.expected:
            text += " (expected " + ", ".join(self.expected) + ")"
        super().__init__(text)
