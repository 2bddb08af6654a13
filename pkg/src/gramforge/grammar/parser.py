"""Recursive-descent parser for ``.mcg`` grammar definition files.

Meta-grammar::

    File       := "grammar" IDENT ("extends" IDENT ("," IDENT)*)? "{" Decl* "}"
    Decl       := Prod | "external" IDENT ";" | AssocBlk | ConceptBlk
    Prod       := IDENT "=" Alt ";"
    Alt        := Seq ("|" Seq)*
    Seq        := Unary+
    Unary      := Prim ("*" | "+" | "?")?
    Prim       := STRING | IDENT ":" "[" STRING "]" | IDENT ":" IDENT | IDENT | "(" Alt ")"
    AssocBlk   := "associations" "{" (IDENT "." IDENT Card "<->" Card IDENT "." IDENT ";")* "}"
    Card       := "*" | INT | INT ".." (INT | "*")
    ConceptBlk := "concept" "simplereference" "{" (IDENT ":" IDENT "." IDENT "->" IDENT "." IDENT ";")* "}"

``grammar``, ``extends``, ``external``, ``associations``, ``concept`` and
``simplereference`` are contextual: they remain usable as labels.
"""

from __future__ import annotations

from gramforge.diagnostics import DiagnosticError, LineIndex, error
from gramforge.grammar.model import (
    Alternation,
    AssociationDecl,
    Cardinality,
    ConstantFlag,
    GrammarModel,
    NonterminalRef,
    Optional,
    Production,
    Repetition,
    Sequence,
    SimpleReferenceDecl,
    Terminal,
    TokenRef,
)
from gramforge.lexing import (
    EOF,
    IDENT,
    INT,
    PUNCT,
    STRING,
    TOKEN_KINDS,
    LexError,
    Token,
    punct_table,
    scan,
    skip_trivia,
)

META_PUNCTUATION = (
    "<->", "->", "..", "{", "}", "=", ";", "|", "*", "+", "?", "(", ")", "[", "]", ":", ".", ",",
)
_META_PUNCTS = punct_table(META_PUNCTUATION)


def parse_grammar(text: str | bytes, file: str = "<input>") -> GrammarModel:
    """Parse grammar source into a :class:`GrammarModel`.

    No semantic checks are performed; see :func:`check_grammar`.

    Raises:
        DiagnosticError: E-GRM-001 on a meta-syntax error, E-GRM-002 when
            ``text`` is bytes that are not valid UTF-8.
    """
    if isinstance(text, (bytes, bytearray)):
        try:
            text = bytes(text).decode("utf-8")
        except UnicodeDecodeError as exc:
            prefix = bytes(text[: exc.start]).decode("utf-8")
            lines = LineIndex(prefix, file)
            raise DiagnosticError(
                [error("E-GRM-002", "invalid UTF-8 in grammar file", lines.span(len(prefix), len(prefix)))]
            ) from None
    return _GrammarParser(text, file).parse_file()


def _tokenize(text: str, lines: LineIndex) -> list[Token]:
    tokens = []
    pos = 0
    try:
        pos = skip_trivia(text, pos)
        while True:
            tok = scan(text, pos, (), _META_PUNCTS)
            tokens.append(tok)
            if tok.kind == EOF:
                return tokens
            pos = skip_trivia(text, tok.end)
    except LexError as exc:
        raise DiagnosticError(
            [error("E-GRM-001", exc.message, lines.span(exc.start, exc.end))]
        ) from None


class _GrammarParser:
    def __init__(self, text: str, file: str) -> None:
        self.lines = LineIndex(text, file)
        self.tokens = _tokenize(text, self.lines)
        self.i = 0

    # -- token helpers -------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def span(self, first: Token, last: Token | None = None):
        last = last or first
        return self.lines.span(first.start, last.end)

    def fail(self, expected: str):
        tok = self.tok
        found = "end of input" if tok.kind == EOF else repr(tok.text)
        raise DiagnosticError(
            [error("E-GRM-001", f"expected {expected}, found {found}", self.span(tok))]
        )

    def at(self, text: str) -> bool:
        return self.tok.kind == PUNCT and self.tok.text == text

    def at_word(self, word: str) -> bool:
        return self.tok.kind == IDENT and self.tok.text == word

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(repr(text))
        return self.advance()

    def expect_word(self, word: str) -> Token:
        if not self.at_word(word):
            self.fail(repr(word))
        return self.advance()

    def expect_ident(self) -> Token:
        if self.tok.kind != IDENT:
            self.fail("identifier")
        return self.advance()

    def advance(self) -> Token:
        tok = self.tok
        self.i += 1
        return tok

    @property
    def last(self) -> Token:
        return self.tokens[self.i - 1]

    # -- file level ----------------------------------------------------

    def parse_file(self) -> GrammarModel:
        first = self.expect_word("grammar")
        name = self.expect_ident()
        decl_spans = {}
        supers = []
        if self.at_word("extends"):
            self.advance()
            while True:
                sup = self.expect_ident()
                supers.append(sup.text)
                decl_spans[("super", sup.text)] = self.span(sup)
                if not self.at(","):
                    break
                self.advance()
        self.expect("{")
        productions, externals, assocs, refs = [], [], [], []
        while not self.at("}"):
            if self.tok.kind != IDENT:
                self.fail("declaration or '}'")
            nxt = self.peek()
            if nxt.kind == PUNCT and nxt.text == "=":
                productions.append(self.parse_production())
            elif self.at_word("external"):
                self.advance()
                ext = self.expect_ident()
                self.expect(";")
                externals.append(ext.text)
                decl_spans.setdefault(("external", ext.text), self.span(ext))
            elif self.at_word("associations"):
                assocs.extend(self.parse_associations())
            elif self.at_word("concept"):
                refs.extend(self.parse_concept())
            else:
                self.advance()
                self.fail("'='")
        self.expect("}")
        if self.tok.kind != EOF:
            self.fail("end of input")
        return GrammarModel(
            name=name.text,
            super_grammars=tuple(supers),
            productions=tuple(productions),
            externals=tuple(externals),
            associations=tuple(assocs),
            simple_refs=tuple(refs),
            span=self.span(first, name),
            decl_spans=decl_spans,
        )

    def parse_production(self) -> Production:
        name = self.advance()
        self.expect("=")
        body = self.parse_alt()
        self.expect(";")
        return Production(name.text, body, self.span(name))

    # -- expressions ---------------------------------------------------

    def parse_alt(self):
        first = self.tok
        alts = [self.parse_seq()]
        while self.at("|"):
            self.advance()
            alts.append(self.parse_seq())
        if len(alts) == 1:
            return alts[0]
        return Alternation(tuple(alts), self.span(first, self.last))

    def _starts_prim(self) -> bool:
        tok = self.tok
        return tok.kind in (STRING, IDENT) or (tok.kind == PUNCT and tok.text == "(")

    def parse_seq(self):
        first = self.tok
        items = []
        while self._starts_prim():
            items.append(self.parse_unary())
        if not items:
            self.fail("expression")
        if len(items) == 1:
            return items[0]
        return Sequence(tuple(items), self.span(first, self.last))

    def parse_unary(self):
        first = self.tok
        prim = self.parse_prim()
        if self.tok.kind == PUNCT and self.tok.text in ("*", "+", "?"):
            op = self.advance().text
            span = self.span(first, self.last)
            if op == "?":
                return Optional(prim, span)
            return Repetition(prim, 0 if op == "*" else 1, span)
        return prim

    def parse_prim(self):
        tok = self.tok
        if tok.kind == STRING:
            self.advance()
            if not tok.value:
                raise DiagnosticError(
                    [error("E-GRM-001", "empty terminal string", self.span(tok))]
                )
            return Terminal(tok.value, self.span(tok))
        if tok.kind == PUNCT and tok.text == "(":
            self.advance()
            inner = self.parse_alt()
            self.expect(")")
            return inner
        ident = self.expect_ident()
        if not self.at(":"):
            if ident.text in TOKEN_KINDS:
                return TokenRef(ident.text, None, self.span(ident))
            return NonterminalRef(ident.text, None, self.span(ident))
        self.advance()
        if self.at("["):
            self.advance()
            kw = self.tok
            if kw.kind != STRING:
                self.fail("string")
            self.advance()
            if not kw.value:
                raise DiagnosticError(
                    [error("E-GRM-001", "empty constant keyword", self.span(kw))]
                )
            self.expect("]")
            return ConstantFlag(ident.text, kw.value, self.span(ident, self.last))
        target = self.expect_ident()
        span = self.span(ident, target)
        if target.text in TOKEN_KINDS:
            return TokenRef(target.text, ident.text, span)
        return NonterminalRef(target.text, ident.text, span)

    # -- declaration blocks ----------------------------------------------

    def parse_card(self) -> Cardinality:
        if self.at("*"):
            self.advance()
            return Cardinality(0, None)
        if self.tok.kind != INT:
            self.fail("cardinality")
        lower = int(self.advance().text)
        if not self.at(".."):
            return Cardinality(lower, lower)
        self.advance()
        if self.at("*"):
            self.advance()
            return Cardinality(lower, None)
        if self.tok.kind != INT:
            self.fail("integer or '*'")
        return Cardinality(lower, int(self.advance().text))

    def parse_associations(self) -> list[AssociationDecl]:
        self.advance()
        self.expect("{")
        out = []
        while not self.at("}"):
            first = self.expect_ident()
            self.expect(".")
            left_role = self.expect_ident().text
            left_card = self.parse_card()
            self.expect("<->")
            right_card = self.parse_card()
            right_class = self.expect_ident().text
            self.expect(".")
            right_role = self.expect_ident().text
            self.expect(";")
            out.append(
                AssociationDecl(
                    first.text, left_role, left_card,
                    right_class, right_role, right_card,
                    self.span(first, self.last),
                )
            )
        self.expect("}")
        return out

    def parse_concept(self) -> list[SimpleReferenceDecl]:
        self.advance()
        self.expect_word("simplereference")
        self.expect("{")
        out = []
        while not self.at("}"):
            role = self.expect_ident()
            self.expect(":")
            src_cls = self.expect_ident().text
            self.expect(".")
            src_attr = self.expect_ident().text
            self.expect("->")
            tgt_cls = self.expect_ident().text
            self.expect(".")
            tgt_attr = self.expect_ident().text
            self.expect(";")
            out.append(
                SimpleReferenceDecl(
                    role.text, src_cls, src_attr, tgt_cls, tgt_attr, self.span(role, self.last)
                )
            )
        self.expect("}")
        return out
