"""Model lexers generated from a grammar's terminals."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from gramforge.diagnostics import DiagnosticError, LineIndex, error
from gramforge.grammar.model import ConstantFlag, GrammarModel, Terminal, walk
from gramforge.lexing import EOF, LexError, Token, is_identifier, punct_table, scan, skip_trivia


@dataclass(frozen=True)
class LexerSpec:
    """Reserved keywords plus punctuation terminals of one language.

    IDENT, STRING and INT tokens and the comment/whitespace rules are fixed
    and shared with the grammar meta-lexer.
    """

    keywords: frozenset[str] = frozenset()
    punctuation: frozenset[str] = frozenset()

    @classmethod
    def from_grammar(cls, gm: GrammarModel, productions=None) -> "LexerSpec":
        """Collect terminals of ``gm`` (optionally only of ``productions``)."""
        terminals = set()
        for p in gm.productions:
            if productions is not None and p.name not in productions:
                continue
            for e in walk(p.body):
                if isinstance(e, Terminal):
                    terminals.add(e.text)
                elif isinstance(e, ConstantFlag):
                    terminals.add(e.keyword)
        return cls(
            frozenset(t for t in terminals if is_identifier(t)),
            frozenset(t for t in terminals if not is_identifier(t)),
        )

    @cached_property
    def punct_index(self) -> dict[str, tuple[str, ...]]:
        return punct_table(self.punctuation)

    def to_json(self) -> dict:
        return {"keywords": sorted(self.keywords), "punctuation": sorted(self.punctuation)}

    @classmethod
    def from_json(cls, d: dict) -> "LexerSpec":
        return cls(frozenset(d["keywords"]), frozenset(d["punctuation"]))


@dataclass(frozen=True)
class LexRegion:
    """Productions embedded from a fragment, lexed with the fragment's spec."""

    productions: tuple[str, ...]
    lexer: LexerSpec

    def to_json(self) -> dict:
        return {"productions": list(self.productions), **self.lexer.to_json()}

    @classmethod
    def from_json(cls, d: dict) -> "LexRegion":
        return cls(tuple(d["productions"]), LexerSpec.from_json(d))


def decode_source(text: str | bytes, file: str, code: str) -> str:
    if isinstance(text, str):
        return text
    try:
        return bytes(text).decode("utf-8")
    except UnicodeDecodeError as exc:
        prefix = bytes(text[: exc.start]).decode("utf-8")
        span = LineIndex(prefix, file).span(len(prefix), len(prefix))
        raise DiagnosticError([error(code, "invalid UTF-8 input", span)]) from None


def tokenize_model(spec: LexerSpec, text: str | bytes, file: str = "<input>") -> list[Token]:
    """Tokenize a whole model text; the end-of-input token is not included.

    Raises:
        DiagnosticError: E-LEX-001 on an unrecognizable character, E-LEX-002
            on an unterminated string or block comment.
    """
    text = decode_source(text, file, "E-LEX-001")
    lines = LineIndex(text, file)
    tokens = []
    try:
        pos = skip_trivia(text, 0)
        while True:
            tok = scan(text, pos, spec.keywords, spec.punct_index)
            if tok.kind == EOF:
                return tokens
            pos = skip_trivia(text, tok.end)
            tok.next = pos
            tok.span = lines.span(tok.start, tok.end)
            tokens.append(tok)
    except LexError as exc:
        raise DiagnosticError([error(exc.code, exc.message, lines.span(exc.start, exc.end))]) from None
