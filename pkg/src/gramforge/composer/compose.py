"""Embedding compiled fragments into the external holes of a host language."""

from __future__ import annotations

from dataclasses import dataclass, replace

from gramforge.composer.artifact import CompiledLanguage
from gramforge.diagnostics import Diagnostic, DiagnosticError, error, has_errors, warning
from gramforge.grammar.checks import is_nullable, nullable_productions
from gramforge.grammar.model import (
    Alternation,
    AssociationDecl,
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
    walk,
)
from gramforge.lexing import IDENT, INT, KEYWORD, PUNCT, STRING, LexError, scan
from gramforge.runtime.lexer import LexRegion
from gramforge.schema import AstSchema, derive_schema, validate_schema


@dataclass(frozen=True)
class CompositionBinding:
    hole_name: str
    fragment: CompiledLanguage
    start_production: str


def check_bindings(host: CompiledLanguage, bindings) -> list[Diagnostic]:
    """E-CMP-020 and E-CMP-022 diagnostics for invalid bindings."""
    diags = []
    bound = set()
    for b in bindings:
        if b.hole_name not in host.holes:
            diags.append(error("E-CMP-020", f"'{b.hole_name}' is not an unbound hole of {host.name}"))
        elif b.hole_name in bound:
            diags.append(error("E-CMP-020", f"hole '{b.hole_name}' is bound twice"))
        bound.add(b.hole_name)
        frag = b.fragment
        if b.start_production in frag.holes:
            diags.append(
                error("E-CMP-022", f"start '{b.start_production}' of {frag.name} is itself an unbound hole")
            )
        elif frag.grammar.production(b.start_production) is None:
            diags.append(error("E-CMP-022", f"{frag.name} has no production '{b.start_production}'"))
    return diags


def _rename_expr(e, rename: dict[str, str]):
    if isinstance(e, NonterminalRef):
        if rename.get(e.target, e.target) == e.target:
            return e
        # keep the derived role name stable under renaming
        return NonterminalRef(rename[e.target], e.role, e.span)
    if isinstance(e, Sequence):
        return Sequence(tuple(_rename_expr(i, rename) for i in e.items), e.span)
    if isinstance(e, Alternation):
        return Alternation(tuple(_rename_expr(a, rename) for a in e.alts), e.span)
    if isinstance(e, Repetition):
        return Repetition(_rename_expr(e.inner, rename), e.min, e.span)
    if isinstance(e, Optional):
        return Optional(_rename_expr(e.inner, rename), e.span)
    return e


def _fragment_names(frag: CompiledLanguage) -> list[str]:
    names = frag.grammar.production_names + list(frag.grammar.externals)
    return list(dict.fromkeys(names))


def compose(host: CompiledLanguage, bindings) -> CompiledLanguage:
    """Fill holes of ``host`` with compiled fragments.

    Fragment names that collide with names already in the composition are
    prefixed with ``<fragment name>_``. Each bound hole's abstract class
    becomes the superclass of the fragment's start class; the parser
    delegates hole positions to that start production and lexes the
    fragment's productions with the fragment's own lexer.

    Raises:
        DiagnosticError: E-CMP-020 binding a non-hole, E-CMP-021 a name
            collision that prefixing cannot resolve, E-CMP-022 a fragment
            start that is missing or a hole.
    """
    bindings = list(bindings)
    diags = check_bindings(host, bindings)
    if diags:
        raise DiagnosticError(diags)
    if not bindings:
        return host.rehash()

    hg = host.grammar
    taken = set(hg.class_names())
    productions = list(hg.productions)
    externals = list(hg.externals)
    associations = list(hg.associations)
    simple_refs = list(hg.simple_refs)
    regions = list(host.regions)
    holes = set(host.holes) - {b.hole_name for b in bindings}
    supers = {c.name: c.super_class for c in host.schema.classes if c.super_class}
    included: dict[str, dict[str, str]] = {}

    for b in bindings:
        frag = b.fragment
        if frag.content_hash not in included:
            rename = {}
            for n in _fragment_names(frag):
                rename[n] = n if n not in taken else f"{frag.name}_{n}"
            new_names = list(rename.values())
            clashes = sorted(
                {n for n in new_names if n in taken} | {n for n in new_names if new_names.count(n) > 1}
            )
            if clashes:
                raise DiagnosticError(
                    [error("E-CMP-021", f"cannot embed {frag.name}: names {', '.join(clashes)} collide")]
                )
            taken.update(new_names)
            included[frag.content_hash] = rename
            fg = frag.grammar
            productions += [Production(rename[p.name], _rename_expr(p.body, rename), p.span) for p in fg.productions]
            externals += [rename[x] for x in fg.externals]
            associations += [
                replace(a, left_class=rename[a.left_class], right_class=rename[a.right_class])
                for a in fg.associations
            ]
            simple_refs += [
                replace(r, source_class=rename[r.source_class], target_class=rename[r.target_class])
                for r in fg.simple_refs
            ]
            embedded = {n for r in frag.regions for n in r.productions}
            regions.append(
                LexRegion(tuple(rename[p.name] for p in fg.productions if p.name not in embedded), frag.lexer)
            )
            regions += [LexRegion(tuple(rename[n] for n in r.productions), r.lexer) for r in frag.regions]
            holes |= {rename[h] for h in frag.holes}
            for c in frag.schema.classes:
                if c.super_class:
                    supers[rename[c.name]] = rename[c.super_class]
        start = included[frag.content_hash][b.start_production]
        if supers.get(start, b.hole_name) != b.hole_name:
            raise DiagnosticError(
                [error("E-CMP-021", f"class {start} already specializes {supers[start]}; cannot also fill {b.hole_name}")]
            )
        supers[start] = b.hole_name

    grammar = GrammarModel(
        name=hg.name,
        productions=tuple(productions),
        externals=tuple(externals),
        associations=tuple(associations),
        simple_refs=tuple(simple_refs),
        span=hg.span,
    )
    derived = derive_schema(grammar)
    schema = AstSchema(
        tuple(replace(c, super_class=supers.get(c.name)) for c in derived.classes),
        host.schema.root_class,
    )
    diags = validate_schema(schema, grammar.simple_refs)
    if has_errors(diags):
        raise DiagnosticError(diags)
    return CompiledLanguage(
        name=host.name,
        grammar=grammar,
        schema=schema,
        lexer=host.lexer,
        holes=frozenset(holes),
        regions=tuple(regions),
    ).rehash()


# -- combination-time analysis ---------------------------------------------------

EOF_SYMBOL = ("eof", "")


def _first(e, firsts, nullable) -> set:
    if isinstance(e, Terminal):
        return {("t", e.text)}
    if isinstance(e, ConstantFlag):
        return {("t", e.keyword)}
    if isinstance(e, TokenRef):
        return {("k", e.kind)}
    if isinstance(e, NonterminalRef):
        return set(firsts.get(e.target, {("x", e.target)}))
    if isinstance(e, Sequence):
        out = set()
        for item in e.items:
            out |= _first(item, firsts, nullable)
            if not is_nullable(item, nullable):
                break
        return out
    if isinstance(e, Alternation):
        return set().union(*(_first(a, firsts, nullable) for a in e.alts))
    return _first(e.inner, firsts, nullable)


def follow_of(gm: GrammarModel, target: str, root: str | None = None) -> set:
    """Symbols that can immediately follow any reference to ``target``.

    Symbols are ``("t", text)`` for terminals, ``("k", kind)`` for token
    kinds, ``("x", name)`` for other externals and ``EOF_SYMBOL``.
    """
    nullable = nullable_productions(gm)
    firsts: dict[str, set] = {p.name: set() for p in gm.productions}
    changed = True
    while changed:
        changed = False
        for p in gm.productions:
            f = _first(p.body, firsts, nullable)
            if not f <= firsts[p.name]:
                firsts[p.name] |= f
                changed = True

    follows: dict[str, set] = {p.name: set() for p in gm.productions}
    root = root or (gm.productions[0].name if gm.productions else None)
    if root in follows:
        follows[root].add(EOF_SYMBOL)
    result: set = set()
    state = {"changed": True}

    def visit(e, fol: set) -> None:
        if isinstance(e, NonterminalRef):
            if e.target == target:
                result.update(fol)
            if e.target in follows and not fol <= follows[e.target]:
                follows[e.target] |= fol
                state["changed"] = True
        elif isinstance(e, Sequence):
            current = fol
            for item in reversed(e.items):
                visit(item, current)
                f = _first(item, firsts, nullable)
                current = f | current if is_nullable(item, nullable) else f
        elif isinstance(e, Alternation):
            for a in e.alts:
                visit(a, fol)
        elif isinstance(e, Repetition):
            visit(e.inner, _first(e.inner, firsts, nullable) | fol)
        elif isinstance(e, Optional):
            visit(e.inner, fol)

    while state["changed"]:
        state["changed"] = False
        for p in gm.productions:
            visit(p.body, set(follows[p.name]))
    return result


def _fragment_vocabulary(frag: CompiledLanguage) -> tuple[set[str], set[str]]:
    """Terminals and token kinds consumed in the fragment's own lexer context."""
    embedded = {n for r in frag.regions for n in r.productions}
    terminals, kinds = set(), set()
    for p in frag.grammar.productions:
        if p.name in embedded:
            continue
        for e in walk(p.body):
            if isinstance(e, Terminal):
                terminals.add(e.text)
            elif isinstance(e, ConstantFlag):
                terminals.add(e.keyword)
            elif isinstance(e, TokenRef):
                kinds.add(e.kind)
    return terminals, kinds


def analyze_composition(host: CompiledLanguage, bindings) -> list[Diagnostic]:
    """Conservative ambiguity warnings for embedding fragments into ``host``.

    W-CMP-101: a terminal or token that may follow the hole in the host can
    also be consumed by the fragment, so a greedy fragment parse could eat
    the host's closing context. W-CMP-102: the host may follow the hole with
    an identifier while the fragment lexer reserves words the host does not,
    so such identifiers would be lexed as fragment keywords.

    Bindings that :func:`check_bindings` rejects are skipped.
    """
    diags = []
    bindings = list(bindings)
    if has_errors(check_bindings(host, bindings)):
        return diags
    for b in bindings:
        frag = b.fragment
        follow = follow_of(host.grammar, b.hole_name, host.schema.root_class)
        terminals, kinds = _fragment_vocabulary(frag)
        overlaps = set()
        for sym_kind, value in sorted(follow):
            if sym_kind == "k" and value in kinds:
                overlaps.add(value)
            elif sym_kind == "t":
                try:
                    tok = scan(value, 0, frag.lexer.keywords, frag.lexer.punct_index)
                except LexError:
                    continue
                if tok.kind in (KEYWORD, PUNCT) and tok.text in terminals:
                    overlaps.add(f'"{value}"')
                elif tok.kind in (IDENT, INT, STRING) and tok.kind in kinds:
                    overlaps.add(f'"{value}"')
        for item in sorted(overlaps):
            diags.append(
                warning(
                    "W-CMP-101",
                    f"{item} may follow hole {b.hole_name} in {host.name} "
                    f"but is also a token of fragment {frag.name}",
                )
            )
        if ("k", IDENT) in follow:
            clash = sorted(frag.lexer.keywords - host.lexer.keywords)
            if clash:
                diags.append(
                    warning(
                        "W-CMP-102",
                        f"identifiers after hole {b.hole_name} would lex as {frag.name} keywords: "
                        + ", ".join(clash),
                    )
                )
    return diags
