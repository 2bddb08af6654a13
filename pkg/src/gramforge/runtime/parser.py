"""Interpretive PEG execution of a compiled language with packrat memoization.

Positions are character offsets of token starts. Tokens are scanned lazily
and cached per lexer context, which lets productions embedded from another
language re-tokenize their region with that language's lexer. Each
(production, position) pair is evaluated at most once per parse.
"""

from __future__ import annotations

from collections import Counter

from gramforge.diagnostics import DiagnosticError, LineIndex, error
from gramforge.grammar.model import (
    Alternation,
    ConstantFlag,
    NonterminalRef,
    Optional,
    Repetition,
    Sequence,
    Terminal,
    TokenRef,
)
from gramforge.grammar.roles import BOOLEAN_KIND, LIST
from gramforge.lexing import EOF, KEYWORD, PUNCT, LexError, Token, is_identifier, scan, skip_trivia
from gramforge.runtime.lexer import decode_source
from gramforge.runtime.model import Model, Node

_ATTR = 0
_CHILD = 1
_MISSING = object()


class _ParsePlan:
    """Per-language data shared by all parse runs (read-only)."""

    def __init__(self, lang) -> None:
        gm, schema = lang.grammar, lang.schema
        self.grammar = gm
        self.root = schema.root_class
        self.lexers = [lang.lexer]
        self.context_of = {}
        for region in lang.regions:
            self.lexers.append(region.lexer)
            for name in region.productions:
                self.context_of[name] = len(self.lexers) - 1
        self.delegates = {}
        for ext in gm.externals:
            if ext in lang.holes:
                self.delegates[ext] = None
                continue
            subs = [c.name for c in schema.classes if c.super_class == ext and not c.is_abstract]
            self.delegates[ext] = subs[0] if subs else None

        self.class_info = {}
        for cls in schema.classes:
            attrs = schema.attributes(cls.name)
            defaults = {}
            for a in attrs:
                if a.kind == BOOLEAN_KIND:
                    defaults[a.name] = False
                elif a.multiplicity == LIST:
                    defaults[a.name] = []
                else:
                    defaults[a.name] = None
            self.class_info[cls.name] = (
                defaults,
                {a.name for a in attrs if a.multiplicity == LIST},
                [c.role for c in schema.compositions(cls.name)],
                [e.role for e in schema.association_ends(cls.name)],
            )


class _Run:
    def __init__(self, plan: _ParsePlan, text: str, file: str) -> None:
        self.plan = plan
        self.text = text
        self.lines = LineIndex(text, file)
        self.fail_pos = -1
        self.expected: set[str] = set()
        self.lex_errors: dict[int, LexError] = {}
        self.back: dict[int, int] = {}
        self.evaluations: Counter = Counter()
        self.caches = [dict() for _ in plan.lexers]
        self.fetchers = [self._make_fetch(spec, cache) for spec, cache in zip(plan.lexers, self.caches)]
        self.rules = {}
        for p in plan.grammar.productions:
            fetch = self.fetchers[plan.context_of.get(p.name, 0)]
            self.rules[p.name] = self._make_rule(p.name, self._compile(p.body, fetch))
        for ext, target in plan.delegates.items():
            self.rules[ext] = self.rules[target] if target else self._make_hole(ext)

    # -- failure bookkeeping ---------------------------------------------

    def fail(self, pos: int, what: str) -> None:
        if pos > self.fail_pos:
            self.fail_pos = pos
            self.expected = {what}
        elif pos == self.fail_pos:
            self.expected.add(what)

    def _make_fetch(self, spec, cache):
        text, back, lex_errors = self.text, self.back, self.lex_errors
        keywords, puncts = spec.keywords, spec.punct_index

        def fetch(pos):
            tok = cache.get(pos)
            if tok is None:
                try:
                    tok = scan(text, pos, keywords, puncts)
                except LexError as exc:
                    lex_errors.setdefault(pos, exc)
                    tok = False
                else:
                    tok.next = pos if tok.kind == EOF else skip_trivia(text, tok.end)
                    back[tok.next] = tok.end
                cache[pos] = tok
            return tok

        return fetch

    # -- expression compilation ------------------------------------------

    def _compile(self, e, fetch):
        fail = self.fail
        if isinstance(e, (Terminal, ConstantFlag)):
            text = e.text if isinstance(e, Terminal) else e.keyword
            kind = KEYWORD if is_identifier(text) else PUNCT
            desc = f'"{text}"'
            label = e.label if isinstance(e, ConstantFlag) else None

            def terminal(pos, out):
                tok = fetch(pos)
                if tok and tok.kind == kind and tok.text == text:
                    if label is not None:
                        out.append((_ATTR, label, True, tok.start, tok.end))
                    return tok.next
                fail(pos, desc)
                return -1

            return terminal
        if isinstance(e, TokenRef):
            kind, label = e.kind, e.label

            def token(pos, out):
                tok = fetch(pos)
                if tok and tok.kind == kind:
                    if label is not None:
                        out.append((_ATTR, label, tok.value, tok.start, tok.end))
                    return tok.next
                fail(pos, kind)
                return -1

            return token
        if isinstance(e, NonterminalRef):
            rules, target, role = self.rules, e.target, e.role

            def call(pos, out):
                r = rules[target](pos)
                if r is None:
                    return -1
                out.append((_CHILD, role, r[1]))
                return r[0]

            return call
        if isinstance(e, Sequence):
            parts = [self._compile(i, fetch) for i in e.items]

            def sequence(pos, out):
                mark = len(out)
                for part in parts:
                    pos = part(pos, out)
                    if pos < 0:
                        del out[mark:]
                        return -1
                return pos

            return sequence
        if isinstance(e, Alternation):
            alts = [self._compile(a, fetch) for a in e.alts]

            def choice(pos, out):
                for alt in alts:
                    r = alt(pos, out)
                    if r >= 0:
                        return r
                return -1

            return choice
        if isinstance(e, Repetition):
            inner, minimum = self._compile(e.inner, fetch), e.min

            def repeat(pos, out):
                mark, count = len(out), 0
                while True:
                    r = inner(pos, out)
                    if r < 0:
                        break
                    count += 1
                    if r == pos:  # no progress: stop rather than loop forever
                        break
                    pos = r
                if count < minimum:
                    del out[mark:]
                    return -1
                return pos

            return repeat
        if isinstance(e, Optional):
            inner = self._compile(e.inner, fetch)

            def optional(pos, out):
                r = inner(pos, out)
                return pos if r < 0 else r

            return optional
        raise TypeError(f"not a syntax expression: {e!r}")

    def _make_rule(self, name, body):
        memo = {}
        evaluations = self.evaluations

        def rule(pos):
            r = memo.get(pos, _MISSING)
            if r is not _MISSING:
                return r
            memo[pos] = None  # re-entry at the same position fails
            evaluations[name, pos] += 1
            out = []
            end = body(pos, out)
            r = None if end < 0 else (end, (name, out, pos, end))
            memo[pos] = r
            return r

        return rule

    def _make_hole(self, name):
        desc = f"<{name}>"

        def hole(pos):
            self.fail(pos, desc)
            return None

        return hole

    # -- driver ------------------------------------------------------------

    def run(self) -> tuple:
        text = self.text
        try:
            start = skip_trivia(text, 0)
            if self.plan.root is None:
                raise DiagnosticError(
                    [error("E-PAR-001", "language has no productions", self.lines.span(start, start))]
                )
            r = self.rules[self.plan.root](start)
        except LexError as exc:
            raise DiagnosticError([error(exc.code, exc.message, self.lines.span(exc.start, exc.end))]) from None
        if r is not None and r[0] == len(text):
            return r[1]
        if r is None or self.fail_pos > r[0]:
            raise DiagnosticError([self._failure()])
        tok = self.fetchers[0](r[0])
        end = tok.end if tok else r[0] + 1
        found = repr(tok.text) if tok else repr(text[r[0]])
        raise DiagnosticError(
            [error("E-PAR-002", f"unexpected input {found} after complete {self.plan.root}",
                   self.lines.span(r[0], end))]
        )

    def _failure(self):
        pos = self.fail_pos
        scanned = [c[pos] for c in self.caches if c.get(pos)]
        if not scanned and pos in self.lex_errors:
            exc = self.lex_errors[pos]
            return error(exc.code, exc.message, self.lines.span(exc.start, exc.end))
        tok = scanned[0] if scanned else None
        if tok is None or tok.kind == EOF:
            found, end = "end of input", pos
        else:
            found, end = repr(tok.text), tok.end
        expected = sorted(self.expected)
        what = expected[0] if len(expected) == 1 else "one of " + ", ".join(expected)
        return error("E-PAR-001", f"syntax error: expected {what}, found {found}", self.lines.span(pos, end))

    # -- tree construction ---------------------------------------------------

    def build(self, root, language_hash: str) -> Model:
        nodes: list = []
        info = self.plan.class_info
        span_of = self.lines.span
        back = self.back

        def visit(pnode) -> int:
            cls, captures, start, end = pnode
            nid = len(nodes)
            nodes.append(None)
            defaults, list_attrs, comp_roles, end_roles = info[cls]
            attrs = {k: (list(v) if isinstance(v, list) else v) for k, v in defaults.items()}
            attr_spans = {}
            pending = {role: [] for role in comp_roles}
            for cap in captures:
                if cap[0] == _ATTR:
                    _, role, value, s, e = cap
                    if role in list_attrs:
                        attrs[role].append(value)
                    else:
                        attrs[role] = value
                        attr_spans[role] = span_of(s, e)
                else:
                    pending[cap[1]].append(cap[2])
            children = {role: [visit(c) for c in pending[role]] for role in comp_roles}
            last = back.get(end, start) if end > start else start
            nodes[nid] = Node(
                nid, cls, attrs, children, {role: [] for role in end_roles}, span_of(start, last), attr_spans
            )
            return nid

        root_id = visit(root)
        return Model(nodes, root_id, language_hash)


def parse_model(lang, text: str | bytes, file: str = "<input>", *, stats: dict | None = None) -> Model:
    """Parse ``text`` with a compiled language into an unlinked Model.

    ``stats``, if given, receives ``evaluations``: a Counter of
    (production, position) evaluations.

    Raises:
        DiagnosticError: E-PAR-001 at the furthest failure with the tokens
            expected there, E-PAR-002 when input remains after a complete
            parse, E-LEX-001/E-LEX-002 for lexical errors.
    """
    text = decode_source(text, file, "E-LEX-001")
    run = _Run(_ParsePlan(lang), text, file)
    try:
        root = run.run()
    finally:
        if stats is not None:
            stats["evaluations"] = run.evaluations
    return run.build(root, lang.content_hash)
