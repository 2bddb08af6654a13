"""Well-formedness checks run before schema derivation."""

from __future__ import annotations

from gramforge.diagnostics import Diagnostic, DiagnosticError, error
from gramforge.grammar.model import (
    Alternation,
    ConstantFlag,
    GrammarModel,
    NonterminalRef,
    Optional,
    Repetition,
    Sequence,
    Terminal,
    TokenRef,
    walk,
)
from gramforge.grammar.roles import merge_roles, role_occurrences


def check_grammar(gm: GrammarModel, resolved_supers=()) -> list[Diagnostic]:
    """Return every well-formedness violation of ``gm``; empty means derivable.

    ``resolved_supers`` supplies the transitively named super-grammars (a
    list, mapping, or lookup function). Checks after duplicate detection run
    on the inheritance-flattened grammar.
    """
    from gramforge.composer.inheritance import flatten_inheritance

    diags = check_duplicates(gm)
    try:
        flat = flatten_inheritance(gm, resolved_supers)
    except DiagnosticError as exc:
        return diags + exc.diagnostics
    return diags + check_flat(flat)


def check_flat(gm: GrammarModel) -> list[Diagnostic]:
    """Checks that apply to an already flattened grammar."""
    diags: list[Diagnostic] = []
    diags += _check_references(gm)
    diags += _check_left_recursion(gm)
    diags += _check_declarations(gm)
    diags += _check_labels(gm)
    return diags


def check_duplicates(gm: GrammarModel) -> list[Diagnostic]:
    diags = []
    seen = set()
    for p in gm.productions:
        if p.name in seen:
            diags.append(error("E-GRM-011", f"duplicate production '{p.name}'", p.span))
        seen.add(p.name)
    for name in gm.externals:
        if name in seen:
            span = gm.decl_spans.get(("external", name))
            diags.append(
                error("E-GRM-011", f"'{name}' is declared both as production and external", span)
            )
    return diags


def _check_references(gm: GrammarModel) -> list[Diagnostic]:
    known = gm.class_names()
    diags = []
    for p in gm.productions:
        for e in walk(p.body):
            if isinstance(e, NonterminalRef) and e.target not in known:
                diags.append(
                    error("E-GRM-010", f"undefined nonterminal '{e.target}' in {p.name}", e.span)
                )
    return diags


def nullable_productions(gm: GrammarModel) -> set[str]:
    nullable: set[str] = set()
    changed = True
    while changed:
        changed = False
        for p in gm.productions:
            if p.name not in nullable and is_nullable(p.body, nullable):
                nullable.add(p.name)
                changed = True
    return nullable


def is_nullable(e, nullable: set[str]) -> bool:
    if isinstance(e, (Terminal, TokenRef, ConstantFlag)):
        return False
    if isinstance(e, NonterminalRef):
        return e.target in nullable
    if isinstance(e, Sequence):
        return all(is_nullable(i, nullable) for i in e.items)
    if isinstance(e, Alternation):
        return any(is_nullable(a, nullable) for a in e.alts)
    if isinstance(e, Repetition):
        return e.min == 0 or is_nullable(e.inner, nullable)
    if isinstance(e, Optional):
        return True
    raise TypeError(e)


def _left_calls(e, nullable: set[str], out: set[str]) -> None:
    if isinstance(e, NonterminalRef):
        out.add(e.target)
    elif isinstance(e, Sequence):
        for item in e.items:
            _left_calls(item, nullable, out)
            if not is_nullable(item, nullable):
                break
    elif isinstance(e, Alternation):
        for a in e.alts:
            _left_calls(a, nullable, out)
    elif isinstance(e, (Repetition, Optional)):
        _left_calls(e.inner, nullable, out)


def left_recursive(gm: GrammarModel) -> list[str]:
    """Names of productions that can reach themselves without consuming input."""
    nullable = nullable_productions(gm)
    names = set(gm.production_names)
    graph = {}
    for p in gm.productions:
        calls: set[str] = set()
        _left_calls(p.body, nullable, calls)
        graph[p.name] = calls & names
    result = []
    for start in gm.production_names:
        # DFS from the start's successors looking for the start again
        stack, seen = list(graph[start]), set()
        while stack:
            n = stack.pop()
            if n == start:
                result.append(start)
                break
            if n in seen:
                continue
            seen.add(n)
            stack.extend(graph.get(n, ()))
    return result


def _check_left_recursion(gm: GrammarModel) -> list[Diagnostic]:
    return [
        error("E-GRM-012", f"production '{name}' is left-recursive", gm.production(name).span)
        for name in left_recursive(gm)
    ]


def _check_declarations(gm: GrammarModel) -> list[Diagnostic]:
    known = gm.class_names()
    diags = []
    owned: dict[tuple[str, str], object] = {}
    for a in gm.associations:
        for cls in (a.left_class, a.right_class):
            if cls not in known:
                diags.append(error("E-GRM-013", f"association names unknown class '{cls}'", a.span))
        for card in (a.left_card, a.right_card):
            if not card.well_formed:
                diags.append(error("E-GRM-013", f"malformed cardinality {card}", a.span))
        for key in ((a.left_class, a.left_role), (a.right_class, a.right_role)):
            if key in owned:
                diags.append(
                    error("E-GRM-013", f"role '{key[1]}' declared twice on class {key[0]}", a.span)
                )
            owned[key] = a
    seen_refs = set()
    for r in gm.simple_refs:
        for cls in (r.source_class, r.target_class):
            if cls not in known:
                diags.append(error("E-GRM-013", f"simplereference names unknown class '{cls}'", r.span))
        if (r.source_class, r.role) in seen_refs:
            diags.append(
                error("E-GRM-013", f"role '{r.role}' of {r.source_class} resolved twice", r.span)
            )
        seen_refs.add((r.source_class, r.role))
        if association_target(gm, r.source_class, r.role) != r.target_class:
            diags.append(
                error(
                    "E-GRM-013",
                    f"no association role '{r.role}' leads from {r.source_class} to {r.target_class}",
                    r.span,
                )
            )
    return diags


def association_target(gm: GrammarModel, cls: str, role: str) -> str | None:
    for a in gm.associations:
        if (a.left_class, a.left_role) == (cls, role):
            return a.right_class
        if (a.right_class, a.right_role) == (cls, role):
            return a.left_class
    return None


def _check_labels(gm: GrammarModel) -> list[Diagnostic]:
    diags = []
    for p in gm.productions:
        _, conflicts = merge_roles(role_occurrences(p.body))
        for first, other in conflicts:
            diags.append(
                error(
                    "E-GRM-014",
                    f"label '{other.role}' in {p.name} is used for both "
                    f"{_describe(first)} and {_describe(other)}",
                    getattr(other.expr, "span", None) or p.span,
                )
            )
    return diags


def _describe(occ) -> str:
    if occ.target is not None:
        return f"child {occ.target}"
    return f"{occ.kind} attribute"
