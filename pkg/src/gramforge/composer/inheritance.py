"""Grammar inheritance: merge a grammar with its super-grammars."""

from __future__ import annotations

from typing import Callable, Iterable, Mapping, Union

from gramforge.diagnostics import DiagnosticError, error
from gramforge.grammar.model import GrammarModel

Resolver = Union[
    Mapping[str, GrammarModel], Callable[[str], "GrammarModel | None"], Iterable[GrammarModel]
]


def as_resolver(supers: Resolver | None) -> Callable[[str], GrammarModel | None]:
    """Accept a mapping, a lookup function, or an iterable of grammars."""
    if supers is None:
        return lambda name: None
    if isinstance(supers, Mapping):
        return supers.get
    if callable(supers):
        return supers
    table = {g.name: g for g in supers}
    return table.get


def linearize(gm: GrammarModel, supers: Resolver | None) -> list[GrammarModel]:
    """Depth-first post-order over the super-grammar graph, ``gm`` last.

    Raises:
        DiagnosticError: E-CMP-001 on a cycle, E-CMP-002 on an unresolved name.
    """
    resolve = as_resolver(supers)
    order: list[GrammarModel] = []
    done: set[str] = set()
    active: list[str] = []

    def visit(g: GrammarModel) -> None:
        active.append(g.name)
        for name in g.super_grammars:
            span = g.decl_spans.get(("super", name), g.span)
            if name in active:
                cycle = " -> ".join(active[active.index(name):] + [name])
                raise DiagnosticError([error("E-CMP-001", f"inheritance cycle {cycle}", span)])
            if name in done:
                continue
            sup = resolve(name)
            if sup is None:
                raise DiagnosticError(
                    [error("E-CMP-002", f"cannot resolve super-grammar '{name}'", span)]
                )
            visit(sup)
        active.pop()
        done.add(g.name)
        order.append(g)

    visit(gm)
    return order


def flatten_inheritance(gm: GrammarModel, supers: Resolver | None = None) -> GrammarModel:
    """Resolve ``extends`` into a single self-contained grammar.

    Productions of a more derived grammar replace inherited ones of the same
    name. The result lists the most-derived grammar's productions first, so
    its first production becomes the root; inherited productions follow in
    reverse linearization order.

    Raises:
        DiagnosticError: E-CMP-001, E-CMP-002, or E-CMP-003 when two grammars
            declare conflicting associations or simple references for the
            same class and role.
    """
    if not gm.super_grammars:
        return gm
    order = linearize(gm, supers)

    winner = {}
    for g in order:
        for p in g.productions:
            winner[p.name] = p
    productions = []
    emitted = set()
    for g in reversed(order):
        for p in g.productions:
            if winner[p.name] is p and p.name not in emitted:
                productions.append(p)
                emitted.add(p.name)

    externals = []
    decl_spans = {}
    for g in order:
        for name in g.externals:
            if name not in emitted and name not in externals:
                externals.append(name)
                decl_spans[("external", name)] = g.decl_spans.get(("external", name))

    def merge(decls_of, keys_of, what):
        merged, owners = [], {}
        for g in order:
            for d in decls_of(g):
                if d in merged:
                    continue
                for key in keys_of(d):
                    prev = owners.get(key)
                    if prev is not None and prev[0] is not g:
                        raise DiagnosticError(
                            [error(
                                "E-CMP-003",
                                f"conflicting {what} redeclaration for {key[0]}.{key[1]} "
                                f"(grammars {prev[0].name} and {g.name})",
                                d.span,
                            )]
                        )
                    owners[key] = (g, d)
                merged.append(d)
        return tuple(merged)

    associations = merge(
        lambda g: g.associations,
        lambda a: [(a.left_class, a.left_role), (a.right_class, a.right_role)],
        "association",
    )
    simple_refs = merge(
        lambda g: g.simple_refs,
        lambda r: [(r.source_class, r.role)],
        "simplereference",
    )
    return GrammarModel(
        name=gm.name,
        super_grammars=(),
        productions=tuple(productions),
        externals=tuple(externals),
        associations=associations,
        simple_refs=simple_refs,
        span=gm.span,
        decl_spans=decl_spans,
    )
