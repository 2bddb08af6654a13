"""Render a GrammarModel back to ``.mcg`` source."""

from __future__ import annotations

from gramforge.grammar.model import (
    PRIMARIES,
    Alternation,
    ConstantFlag,
    GrammarModel,
    NonterminalRef,
    Optional,
    Repetition,
    Sequence,
    Terminal,
    TokenRef,
)
from gramforge.lexing import escape_string


def format_expr(expr) -> str:
    if isinstance(expr, Terminal):
        return escape_string(expr.text)
    if isinstance(expr, TokenRef):
        return f"{expr.label}:{expr.kind}" if expr.label else expr.kind
    if isinstance(expr, NonterminalRef):
        return f"{expr.label}:{expr.target}" if expr.label else expr.target
    if isinstance(expr, ConstantFlag):
        return f"{expr.label}:[{escape_string(expr.keyword)}]"
    if isinstance(expr, Sequence):
        return " ".join(
            f"({format_expr(e)})" if isinstance(e, (Sequence, Alternation)) else format_expr(e)
            for e in expr.items
        )
    if isinstance(expr, Alternation):
        return " | ".join(
            f"({format_expr(a)})" if isinstance(a, Alternation) else format_expr(a)
            for a in expr.alts
        )
    if isinstance(expr, (Repetition, Optional)):
        inner = format_expr(expr.inner)
        if not isinstance(expr.inner, PRIMARIES):
            inner = f"({inner})"
        if isinstance(expr, Optional):
            return inner + "?"
        return inner + ("*" if expr.min == 0 else "+")
    raise TypeError(f"not a syntax expression: {expr!r}")


def format_grammar(gm: GrammarModel) -> str:
    head = f"grammar {gm.name}"
    if gm.super_grammars:
        head += " extends " + ", ".join(gm.super_grammars)
    lines = [head + " {"]
    for p in gm.productions:
        lines.append(f"  {p.name} = {format_expr(p.body)};")
    for name in gm.externals:
        lines.append(f"  external {name};")
    if gm.associations:
        lines.append("  associations {")
        for a in gm.associations:
            lines.append(
                f"    {a.left_class}.{a.left_role} {a.left_card} <-> "
                f"{a.right_card} {a.right_class}.{a.right_role};"
            )
        lines.append("  }")
    if gm.simple_refs:
        lines.append("  concept simplereference {")
        for r in gm.simple_refs:
            lines.append(
                f"    {r.role}: {r.source_class}.{r.source_attr} -> {r.target_class}.{r.target_attr};"
            )
        lines.append("  }")
    lines.append("}")
    return "\n".join(lines) + "\n"
