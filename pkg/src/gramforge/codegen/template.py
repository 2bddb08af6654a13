"""Template language for model-to-text generation (``.mct`` files).

Syntax::

    ${path}                              interpolate a string or boolean
    @foreach v in path { ... }           iterate a list, binding v
    @if path { ... } @else { ... }       conditional; @else part optional
    @include "name" with path            render another template on a node
    $$  @@                               literal $ and @

Paths are dot-separated role chains. Inside a block body, braces must
balance; the first unmatched ``}`` closes the block. Spaces and tabs right
after a block's opening brace are dropped, together with one following
newline; a line break right after a block's closing brace is dropped too.
Any other text is literal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from gramforge.diagnostics import DiagnosticError, LineIndex, Span, error


def _span():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Literal:
    text: str


@dataclass(frozen=True)
class Interp:
    path: tuple[str, ...]
    span: Span | None = _span()


@dataclass(frozen=True)
class Foreach:
    var: str
    path: tuple[str, ...]
    body: tuple
    span: Span | None = _span()


@dataclass(frozen=True)
class If:
    path: tuple[str, ...]
    then_body: tuple
    else_body: tuple | None = None
    span: Span | None = _span()


@dataclass(frozen=True)
class Include:
    template_name: str
    path: tuple[str, ...]
    span: Span | None = _span()


@dataclass(frozen=True)
class Template:
    name: str
    body: tuple


_PATH = r"[A-Za-z_][A-Za-z0-9_]*(?:\.[A-Za-z_][A-Za-z0-9_]*)*"
_INTERP = re.compile(r"\$\{\s*(" + _PATH + r")\s*\}")
_FOREACH = re.compile(r"@foreach\s+([A-Za-z_][A-Za-z0-9_]*)\s+in\s+(" + _PATH + r")\s*\{")
_IF = re.compile(r"@if\s+(" + _PATH + r")\s*\{")
_ELSE = re.compile(r"\s*@else\s*\{")
_INCLUDE = re.compile(r'@include\s+"([^"\\\n]+)"\s+with\s+(' + _PATH + r")")
_DIRECTIVE = re.compile(r"@(foreach|if|else|include)\b")
_BODY_LEAD = re.compile(r"[ \t]*(?:\r?\n)?")
_BODY_TRAIL = re.compile(r"[ \t]*\r?\n")
_PLAIN = re.compile(r"[^$@{}]+")


def parse_template(text: str, name: str = "<template>") -> Template:
    """Parse template source.

    Raises:
        DiagnosticError: E-GEN-001 for an unclosed block, E-GEN-002 for a
            malformed directive or interpolation.
    """
    parser = _TemplateParser(text, name)
    body = parser.parse_body(opener=None)
    return Template(name, body)


class _TemplateParser:
    def __init__(self, text: str, name: str) -> None:
        self.text = text
        self.pos = 0
        self.lines = LineIndex(text, name)

    def malformed(self, what: str):
        end = self.text.find("\n", self.pos)
        end = len(self.text) if end < 0 else end
        raise DiagnosticError([error("E-GEN-002", f"malformed {what}", self.lines.span(self.pos, end))])

    def parse_body(self, opener: Span | None) -> tuple:
        """Parse until EOF (top level) or the ``}`` closing an open block."""
        text = self.text
        segments: list = []
        buf: list[str] = []
        depth = 0

        def flush():
            if buf:
                segments.append(Literal("".join(buf)))
                buf.clear()

        while self.pos < len(text):
            pos = self.pos
            m = _PLAIN.match(text, pos)
            if m:
                buf.append(m.group(0))
                self.pos = m.end()
                continue
            ch = text[pos]
            if text.startswith("$$", pos):
                buf.append("$")
                self.pos += 2
            elif text.startswith("${", pos):
                m = _INTERP.match(text, pos)
                if not m:
                    self.malformed("interpolation")
                flush()
                segments.append(Interp(tuple(m.group(1).split(".")), self.lines.span(pos, m.end())))
                self.pos = m.end()
            elif text.startswith("@@", pos):
                buf.append("@")
                self.pos += 2
            elif ch == "@" and _DIRECTIVE.match(text, pos):
                flush()
                segments.append(self.parse_directive())
            elif ch == "{":
                depth += 1
                buf.append(ch)
                self.pos += 1
            elif ch == "}":
                if opener is not None and depth == 0:
                    flush()
                    trail = _BODY_TRAIL.match(text, pos + 1)
                    self.pos = trail.end() if trail else pos + 1
                    return tuple(segments)
                depth = max(0, depth - 1)
                buf.append(ch)
                self.pos += 1
            else:
                buf.append(ch)
                self.pos += 1
        if opener is not None:
            raise DiagnosticError([error("E-GEN-001", "unbalanced block: missing '}'", opener)])
        flush()
        return tuple(segments)

    def block(self, m: re.Match) -> tuple:
        opener = self.lines.span(m.start(), m.end())
        self.pos = _BODY_LEAD.match(self.text, m.end()).end()
        return self.parse_body(opener)

    def parse_directive(self):
        text, pos = self.text, self.pos
        word = _DIRECTIVE.match(text, pos).group(1)
        if word == "foreach":
            m = _FOREACH.match(text, pos)
            if not m:
                self.malformed("@foreach directive")
            span = self.lines.span(pos, m.end())
            body = self.block(m)
            return Foreach(m.group(1), tuple(m.group(2).split(".")), body, span)
        if word == "if":
            m = _IF.match(text, pos)
            if not m:
                self.malformed("@if directive")
            span = self.lines.span(pos, m.end())
            then_body = self.block(m)
            else_body = None
            m_else = _ELSE.match(text, self.pos)
            if m_else:
                else_body = self.block(m_else)
            return If(tuple(m.group(1).split(".")), then_body, else_body, span)
        if word == "include":
            m = _INCLUDE.match(text, pos)
            if not m:
                self.malformed("@include directive")
            self.pos = m.end()
            return Include(m.group(1), tuple(m.group(2).split(".")), self.lines.span(pos, m.end()))
        self.malformed("@else without @if")
