"""Coded, span-carrying diagnostics shared by every pipeline stage."""

from __future__ import annotations

import bisect
import json
import re
from dataclasses import dataclass
from typing import Iterable

ERROR = "error"
WARNING = "warning"


@dataclass(frozen=True)
class Span:
    """Source region. Lines and columns are 1-based; ``end_col`` is exclusive."""

    file: str
    start_line: int
    start_col: int
    end_line: int
    end_col: int

    def to_json(self) -> dict:
        return {
            "file": self.file,
            "startLine": self.start_line,
            "startCol": self.start_col,
            "endLine": self.end_line,
            "endCol": self.end_col,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Span":
        return cls(
            data["file"],
            data["startLine"],
            data["startCol"],
            data["endLine"],
            data["endCol"],
        )


@dataclass(frozen=True)
class Diagnostic:
    code: str
    severity: str
    message: str
    span: Span | None = None

    @property
    def is_error(self) -> bool:
        return self.severity == ERROR

    def to_json(self) -> dict:
        return {
            "code": self.code,
            "severity": self.severity,
            "message": self.message,
            "span": self.span.to_json() if self.span else None,
        }

    def format(self) -> str:
        """Render as ``CODE severity file:line:col message``."""
        if self.span is None:
            where = "-"
        else:
            where = f"{self.span.file}:{self.span.start_line}:{self.span.start_col}"
        return f"{self.code} {self.severity} {where} {self.message}"

    def format_json(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, ensure_ascii=False)


def error(code: str, message: str, span: Span | None = None) -> Diagnostic:
    return Diagnostic(code, ERROR, message, span)


def warning(code: str, message: str, span: Span | None = None) -> Diagnostic:
    return Diagnostic(code, WARNING, message, span)


def has_errors(diagnostics: Iterable[Diagnostic]) -> bool:
    return any(d.is_error for d in diagnostics)


class DiagnosticError(Exception):
    """Raised by operations whose failure mode is a set of diagnostics."""

    def __init__(self, diagnostics: Iterable[Diagnostic]) -> None:
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(d.format() for d in self.diagnostics))

    @property
    def codes(self) -> list[str]:
        return [d.code for d in self.diagnostics]


class LineIndex:
    """Maps character offsets of a text to 1-based (line, column) pairs."""

    def __init__(self, text: str, file: str = "<input>") -> None:
        self.text = text
        self.file = file
        self._starts = [0] + [m.end() for m in re.finditer("\n", text)]

    def position(self, offset: int) -> tuple[int, int]:
        offset = max(0, min(offset, len(self.text)))
        line = bisect.bisect_right(self._starts, offset) - 1
        return line + 1, offset - self._starts[line] + 1

    def span(self, start: int, end: int) -> Span:
        sl, sc = self.position(start)
        el, ec = self.position(max(start, end))
        return Span(self.file, sl, sc, el, ec)
