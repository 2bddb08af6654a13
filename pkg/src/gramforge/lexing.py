"""Lexical rules shared by the grammar meta-lexer and generated model lexers.

Both lexers recognise the same token shapes::

    IDENT   [A-Za-z_][A-Za-z0-9_]*
    INT     [0-9]+
    STRING  "..." with \\" \\\\ \\n \\t escapes, no raw newlines

and skip whitespace, ``//`` line comments and ``/* */`` block comments.
They differ only in their punctuation table and reserved keywords.
"""

from __future__ import annotations

import re
from typing import Iterable

IDENT = "IDENT"
STRING = "STRING"
INT = "INT"
KEYWORD = "KEYWORD"
PUNCT = "PUNCT"
EOF = "EOF"

TOKEN_KINDS = (IDENT, STRING, INT)

_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_INT_RE = re.compile(r"[0-9]+")
_WS_RE = re.compile(r"\s+")
_STRING_RE = re.compile(r'"((?:[^"\\\n]|\\.)*)"')
_ESCAPES = {'"': '"', "\\": "\\", "n": "\n", "t": "\t"}
_ESCAPE_RE = re.compile(r"\\(.)")


def is_identifier(text: str) -> bool:
    return _IDENT_RE.fullmatch(text) is not None


def is_integer(text: str) -> bool:
    return _INT_RE.fullmatch(text) is not None


def escape_string(text: str) -> str:
    """Quote ``text`` so that :func:`scan` reads it back unchanged."""
    body = (
        text.replace("\\", "\\\\")
        .replace('"', '\\"')
        .replace("\n", "\\n")
        .replace("\t", "\\t")
    )
    return f'"{body}"'


class LexError(Exception):
    def __init__(self, code: str, message: str, start: int, end: int) -> None:
        super().__init__(message)
        self.code = code
        self.message = message
        self.start = start
        self.end = end


class Token:
    """A scanned token.

    ``start``/``end`` are character offsets of the lexeme; ``next`` is the
    offset of the following token after trivia. ``value`` is the decoded
    content for STRING tokens and the lexeme otherwise.
    """

    __slots__ = ("kind", "text", "value", "start", "end", "next", "span")

    def __init__(self, kind, text, value, start, end, next_pos=None, span=None):
        self.kind = kind
        self.text = text
        self.value = value
        self.start = start
        self.end = end
        self.next = next_pos
        self.span = span

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.text!r})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Token):
            return NotImplemented
        return (self.kind, self.text, self.start, self.end) == (
            other.kind,
            other.text,
            other.start,
            other.end,
        )

    __hash__ = None


def skip_trivia(text: str, pos: int) -> int:
    """Return the offset of the first non-trivia character at or after ``pos``."""
    n = len(text)
    while pos < n:
        m = _WS_RE.match(text, pos)
        if m:
            pos = m.end()
            continue
        if text.startswith("//", pos):
            nl = text.find("\n", pos)
            pos = n if nl < 0 else nl + 1
            continue
        if text.startswith("/*", pos):
            close = text.find("*/", pos + 2)
            if close < 0:
                raise LexError("E-LEX-002", "unterminated block comment", pos, n)
            pos = close + 2
            continue
        break
    return pos


def punct_table(terminals: Iterable[str]) -> dict[str, tuple[str, ...]]:
    """Index punctuation terminals by first character, longest first."""
    table: dict[str, list[str]] = {}
    for t in set(terminals):
        table.setdefault(t[0], []).append(t)
    return {k: tuple(sorted(v, key=lambda s: (-len(s), s))) for k, v in table.items()}


def _decode(body: str, start: int) -> str:
    def repl(m: re.Match) -> str:
        ch = m.group(1)
        if ch not in _ESCAPES:
            pos = start + 1 + m.start()
            raise LexError("E-LEX-001", f"invalid escape '\\{ch}'", pos, pos + 2)
        return _ESCAPES[ch]

    return _ESCAPE_RE.sub(repl, body)


def scan(text: str, pos: int, keywords, puncts: dict[str, tuple[str, ...]]) -> Token:
    """Scan one token starting exactly at ``pos`` (trivia already skipped).

    At the end of input an EOF token is returned. A punctuation terminal is
    preferred over an IDENT lexeme only when strictly longer, and over an
    INT lexeme when at least as long.
    """
    if pos >= len(text):
        return Token(EOF, "", "", pos, pos)
    ch = text[pos]
    punct = None
    for cand in puncts.get(ch, ()):
        if text.startswith(cand, pos):
            punct = cand
            break
    if ch == '"':
        m = _STRING_RE.match(text, pos)
        if m is None:
            nl = text.find("\n", pos)
            end = len(text) if nl < 0 else nl
            raise LexError("E-LEX-002", "unterminated string literal", pos, end)
        if punct is None or len(punct) <= m.end() - pos:
            lexeme = m.group(0)
            return Token(STRING, lexeme, _decode(m.group(1), pos), pos, m.end())
    m = _IDENT_RE.match(text, pos)
    if m is not None:
        lexeme = m.group(0)
        if punct is None or len(punct) <= len(lexeme):
            kind = KEYWORD if lexeme in keywords else IDENT
            return Token(kind, lexeme, lexeme, pos, m.end())
    m = _INT_RE.match(text, pos)
    if m is not None:
        lexeme = m.group(0)
        if punct is None or len(punct) < len(lexeme):
            return Token(INT, lexeme, lexeme, pos, m.end())
    if punct is not None:
        return Token(PUNCT, punct, punct, pos, pos + len(punct))
    raise LexError("E-LEX-001", f"unrecognizable character {ch!r}", pos, pos + 1)
