"""Exceptions shared across the checker and the semantic layer."""

from __future__ import annotations


class TypeCheckError(Exception):
    """A rejected program. ``rule`` names the typing rule whose premise failed."""

    def __init__(self, message: str, rule: str | None = None):
        super().__init__(message)
        self.rule = rule
        self.message = message

    def __str__(self) -> str:
        if self.rule:
            return f"[{self.rule}] {self.message}"
        return self.message


class EvaluationPanic(RuntimeError):
    """A semantic value had the wrong dynamic tag.

    Elaborated terms must never raise this; if one does, the checker
    accepted something it should not have.
    """


class ParseError(Exception):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
