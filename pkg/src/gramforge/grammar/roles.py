"""Role extraction from production bodies.

Every labeled token reference, constant flag and nonterminal reference in a
production contributes a *role* to the production's class. This module finds
each occurrence with its multiplicity context and merges repeated roles.
"""

from __future__ import annotations

from dataclasses import dataclass

from gramforge.grammar.model import (
    Alternation,
    ConstantFlag,
    NonterminalRef,
    Optional,
    Repetition,
    Sequence,
    TokenRef,
)

STRING_KIND = "string"
BOOLEAN_KIND = "boolean"
COMPOSITION = "composition"

ONE = "one"
OPTIONAL = "optional"
LIST = "list"


@dataclass(frozen=True)
class RoleOccurrence:
    role: str
    kind: str  # string | boolean | composition
    target: str | None  # child class for compositions
    multiplicity: str
    alt_path: tuple  # ((alternation number, branch index), ...)
    expr: object


@dataclass(frozen=True)
class Role:
    name: str
    kind: str
    target: str | None
    multiplicity: str


def role_occurrences(body) -> list[RoleOccurrence]:
    out: list[RoleOccurrence] = []
    counter = [0]

    def visit(e, under_rep, under_opt, path):
        if isinstance(e, TokenRef):
            if e.label is not None:
                out.append(RoleOccurrence(e.label, STRING_KIND, None, mult(under_rep, under_opt), path, e))
        elif isinstance(e, ConstantFlag):
            # flags default to false, so they are always present exactly once
            out.append(RoleOccurrence(e.label, BOOLEAN_KIND, None, ONE, path, e))
        elif isinstance(e, NonterminalRef):
            out.append(RoleOccurrence(e.role, COMPOSITION, e.target, mult(under_rep, under_opt), path, e))
        elif isinstance(e, Sequence):
            for item in e.items:
                visit(item, under_rep, under_opt, path)
        elif isinstance(e, Alternation):
            counter[0] += 1
            n = counter[0]
            for i, alt in enumerate(e.alts):
                visit(alt, under_rep, True, path + ((n, i),))
        elif isinstance(e, Repetition):
            visit(e.inner, True, under_opt, path)
        elif isinstance(e, Optional):
            visit(e.inner, under_rep, True, path)

    visit(body, False, False, ())
    return out


def mult(under_rep: bool, under_opt: bool) -> str:
    if under_rep:
        return LIST
    return OPTIONAL if under_opt else ONE


def _exclusive(a: RoleOccurrence, b: RoleOccurrence) -> bool:
    branches = dict(a.alt_path)
    return any(n in branches and branches[n] != i for n, i in b.alt_path)


def merge_roles(occurrences: list[RoleOccurrence]) -> tuple[list[Role], list[tuple[RoleOccurrence, RoleOccurrence]]]:
    """Merge occurrences into roles, in order of first appearance.

    A role seen several times is ``list`` if any occurrence is ``list`` or if
    two occurrences can match in the same parse; otherwise ``optional``.
    Returns the roles plus pairs of occurrences whose kinds or targets
    disagree.
    """
    grouped: dict[str, list[RoleOccurrence]] = {}
    for occ in occurrences:
        grouped.setdefault(occ.role, []).append(occ)
    roles, conflicts = [], []
    for name, occs in grouped.items():
        first = occs[0]
        for other in occs[1:]:
            if (other.kind, other.target) != (first.kind, first.target):
                conflicts.append((first, other))
        if first.kind == BOOLEAN_KIND or len(occs) == 1:
            multiplicity = first.multiplicity
        elif any(o.multiplicity == LIST for o in occs) or any(
            not _exclusive(a, b) for i, a in enumerate(occs) for b in occs[i + 1:]
        ):
            multiplicity = LIST
        else:
            multiplicity = OPTIONAL
        roles.append(Role(name, first.kind, first.target, multiplicity))
    return roles, conflicts
