"""In-memory form of a grammar definition file.

All values are frozen dataclasses. Source spans are carried for diagnostics
but excluded from equality, so two models parsed from differently formatted
text compare equal when their structure matches.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Union

from gramforge.diagnostics import Span


def _span():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class Terminal:
    text: str
    span: Span | None = _span()


@dataclass(frozen=True)
class TokenRef:
    kind: str  # IDENT | STRING | INT
    label: str | None = None
    span: Span | None = _span()


@dataclass(frozen=True)
class NonterminalRef:
    target: str
    label: str | None = None
    span: Span | None = _span()

    @property
    def role(self) -> str:
        return self.label if self.label is not None else lower_first(self.target)


@dataclass(frozen=True)
class ConstantFlag:
    label: str
    keyword: str
    span: Span | None = _span()


@dataclass(frozen=True)
class Sequence:
    items: tuple
    span: Span | None = _span()


@dataclass(frozen=True)
class Alternation:
    alts: tuple
    span: Span | None = _span()


@dataclass(frozen=True)
class Repetition:
    inner: "SyntaxExpr"
    min: int = 0
    span: Span | None = _span()


@dataclass(frozen=True)
class Optional:
    inner: "SyntaxExpr"
    span: Span | None = _span()


SyntaxExpr = Union[
    Terminal, TokenRef, NonterminalRef, ConstantFlag, Sequence, Alternation, Repetition, Optional
]

PRIMARIES = (Terminal, TokenRef, NonterminalRef, ConstantFlag)


def lower_first(name: str) -> str:
    return name[:1].lower() + name[1:]


def children(expr: SyntaxExpr) -> tuple:
    if isinstance(expr, Sequence):
        return expr.items
    if isinstance(expr, Alternation):
        return expr.alts
    if isinstance(expr, (Repetition, Optional)):
        return (expr.inner,)
    return ()


def walk(expr: SyntaxExpr) -> Iterator[SyntaxExpr]:
    """Yield ``expr`` and all nested expressions in pre-order."""
    stack = [expr]
    while stack:
        e = stack.pop()
        yield e
        stack.extend(reversed(children(e)))


@dataclass(frozen=True)
class Cardinality:
    """Bounds ``lower..upper``; ``upper`` is ``None`` for unbounded."""

    lower: int
    upper: int | None

    @classmethod
    def parse(cls, text: str) -> "Cardinality":
        if text == "*":
            return cls(0, None)
        if ".." in text:
            lo, hi = text.split("..", 1)
            return cls(int(lo), None if hi == "*" else int(hi))
        return cls(int(text), int(text))

    def __str__(self) -> str:
        if self.upper is None:
            return "*" if self.lower == 0 else f"{self.lower}..*"
        if self.lower == self.upper:
            return str(self.lower)
        return f"{self.lower}..{self.upper}"

    def admits(self, count: int) -> bool:
        return count >= self.lower and (self.upper is None or count <= self.upper)

    @property
    def well_formed(self) -> bool:
        return self.lower >= 0 and (self.upper is None or self.lower <= self.upper)


@dataclass(frozen=True)
class Production:
    name: str
    body: SyntaxExpr
    span: Span | None = _span()


@dataclass(frozen=True)
class AssociationDecl:
    """``left_class.left_role left_card <-> right_card right_class.right_role``"""

    left_class: str
    left_role: str
    left_card: Cardinality
    right_class: str
    right_role: str
    right_card: Cardinality
    span: Span | None = _span()


@dataclass(frozen=True)
class SimpleReferenceDecl:
    """``role: source_class.source_attr -> target_class.target_attr``"""

    role: str
    source_class: str
    source_attr: str
    target_class: str
    target_attr: str
    span: Span | None = _span()


@dataclass(frozen=True)
class GrammarModel:
    name: str
    super_grammars: tuple[str, ...] = ()
    productions: tuple[Production, ...] = ()
    externals: tuple[str, ...] = ()
    associations: tuple[AssociationDecl, ...] = ()
    simple_refs: tuple[SimpleReferenceDecl, ...] = ()
    span: Span | None = _span()
    # spans of `external X;` and `extends X` names, keyed by ("external"|"super", name)
    decl_spans: Mapping = field(default_factory=dict, compare=False, repr=False, hash=False)

    def production(self, name: str) -> Production | None:
        for p in self.productions:
            if p.name == name:
                return p
        return None

    @property
    def production_names(self) -> list[str]:
        return [p.name for p in self.productions]

    def class_names(self) -> set[str]:
        return set(self.production_names) | set(self.externals)
