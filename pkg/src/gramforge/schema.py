"""Abstract-syntax metamodel derived from a flattened grammar.

Derivation rules, per production ``P``:

* a labeled token reference becomes a string attribute named by the label;
* a constant flag ``l:["kw"]`` becomes a boolean attribute ``l``;
* a nonterminal reference becomes a composition whose role is the label, or
  the target name with its first letter lowercased;
* multiplicity is ``list`` under any repetition, ``optional`` under an
  optional or an alternation, and ``one`` otherwise.

Associations ``L.r1 c1 <-> c2 R.r2`` give ``L`` an end ``r1`` towards ``R``
with multiplicity ``c2`` and ``R`` an end ``r2`` towards ``L`` with
multiplicity ``c1``. External nonterminals become abstract classes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from gramforge.diagnostics import Diagnostic, DiagnosticError, error
from gramforge.grammar.model import Cardinality, GrammarModel
from gramforge.grammar.roles import (
    BOOLEAN_KIND,
    COMPOSITION,
    LIST,
    STRING_KIND,
    merge_roles,
    role_occurrences,
)


@dataclass(frozen=True)
class Attribute:
    name: str
    kind: str  # string | boolean
    multiplicity: str  # one | optional | list


@dataclass(frozen=True)
class Composition:
    role: str
    child_class: str
    multiplicity: str


@dataclass(frozen=True)
class AssociationEnd:
    role: str
    target_class: str
    multiplicity: Cardinality
    inverse_role: str


@dataclass(frozen=True)
class AstClass:
    name: str
    is_abstract: bool = False
    super_class: str | None = None
    attributes: tuple[Attribute, ...] = ()
    compositions: tuple[Composition, ...] = ()
    association_ends: tuple[AssociationEnd, ...] = ()

    def role_names(self) -> list[str]:
        return (
            [a.name for a in self.attributes]
            + [c.role for c in self.compositions]
            + [e.role for e in self.association_ends]
        )

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "abstract": self.is_abstract,
            "superClass": self.super_class,
            "attributes": [
                {"name": a.name, "kind": a.kind, "multiplicity": a.multiplicity}
                for a in self.attributes
            ],
            "compositions": [
                {"role": c.role, "childClass": c.child_class, "multiplicity": c.multiplicity}
                for c in self.compositions
            ],
            "associationEnds": [
                {
                    "role": e.role,
                    "targetClass": e.target_class,
                    "multiplicity": str(e.multiplicity),
                    "inverseRole": e.inverse_role,
                }
                for e in self.association_ends
            ],
        }

    @classmethod
    def from_json(cls, d: dict) -> "AstClass":
        return cls(
            name=d["name"],
            is_abstract=d["abstract"],
            super_class=d["superClass"],
            attributes=tuple(
                Attribute(a["name"], a["kind"], a["multiplicity"]) for a in d["attributes"]
            ),
            compositions=tuple(
                Composition(c["role"], c["childClass"], c["multiplicity"]) for c in d["compositions"]
            ),
            association_ends=tuple(
                AssociationEnd(
                    e["role"], e["targetClass"], Cardinality.parse(e["multiplicity"]), e["inverseRole"]
                )
                for e in d["associationEnds"]
            ),
        )


@dataclass(frozen=True)
class AstSchema:
    classes: tuple[AstClass, ...]
    root_class: str | None

    @cached_property
    def _by_name(self) -> dict[str, AstClass]:
        return {c.name: c for c in self.classes}

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def get(self, name: str) -> AstClass:
        return self._by_name[name]

    def lineage(self, name: str) -> list[AstClass]:
        """``name`` followed by its superclasses, nearest first."""
        out, seen = [], set()
        while name is not None and name in self._by_name and name not in seen:
            seen.add(name)
            cls = self._by_name[name]
            out.append(cls)
            name = cls.super_class
        return out

    def is_subclass(self, name: str, ancestor: str) -> bool:
        return any(c.name == ancestor for c in self.lineage(name))

    def subclasses(self, name: str) -> list[str]:
        return [c.name for c in self.classes if self.is_subclass(c.name, name)]

    def attributes(self, name: str) -> list[Attribute]:
        return [a for c in reversed(self.lineage(name)) for a in c.attributes]

    def compositions(self, name: str) -> list[Composition]:
        return [x for c in reversed(self.lineage(name)) for x in c.compositions]

    def association_ends(self, name: str) -> list[AssociationEnd]:
        return [e for c in reversed(self.lineage(name)) for e in c.association_ends]

    def member(self, name: str, role: str):
        """Find ``role`` on class ``name``: attribute, then composition, then end."""
        for group in (self.attributes(name), self.compositions(name), self.association_ends(name)):
            for m in group:
                if getattr(m, "name", None) == role or getattr(m, "role", None) == role:
                    return m
        return None

    def to_json(self) -> dict:
        return {"rootClass": self.root_class, "classes": [c.to_json() for c in self.classes]}

    @classmethod
    def from_json(cls, d: dict) -> "AstSchema":
        return cls(tuple(AstClass.from_json(c) for c in d["classes"]), d["rootClass"])


def derive_schema(gm: GrammarModel) -> AstSchema:
    """Derive the AST metamodel of a checked, flattened grammar.

    Raises:
        DiagnosticError: E-SCH-001 when a declared association role collides
            with a derived role, E-SCH-002 when an association names an
            unknown class.
    """
    diags: list[Diagnostic] = []
    members: dict[str, dict] = {}
    for p in gm.productions:
        roles, _ = merge_roles(role_occurrences(p.body))
        members[p.name] = {
            "abstract": False,
            "attributes": [
                Attribute(r.name, r.kind, r.multiplicity)
                for r in roles
                if r.kind in (STRING_KIND, BOOLEAN_KIND)
            ],
            "compositions": [
                Composition(r.name, r.target, r.multiplicity) for r in roles if r.kind == COMPOSITION
            ],
            "ends": [],
        }
    for name in gm.externals:
        members.setdefault(name, {"abstract": True, "attributes": [], "compositions": [], "ends": []})

    for a in gm.associations:
        missing = [c for c in (a.left_class, a.right_class) if c not in members]
        if missing:
            for c in missing:
                diags.append(error("E-SCH-002", f"association references unknown class '{c}'", a.span))
            continue
        sides = (
            (a.left_class, AssociationEnd(a.left_role, a.right_class, a.right_card, a.right_role)),
            (a.right_class, AssociationEnd(a.right_role, a.left_class, a.left_card, a.left_role)),
        )
        for owner, end in sides:
            m = members[owner]
            taken = (
                [x.name for x in m["attributes"]]
                + [x.role for x in m["compositions"]]
                + [x.role for x in m["ends"]]
            )
            if end.role in taken:
                diags.append(
                    error("E-SCH-001", f"association role '{end.role}' collides on class {owner}", a.span)
                )
            else:
                m["ends"].append(end)
    if diags:
        raise DiagnosticError(diags)

    classes = tuple(
        AstClass(
            name=name,
            is_abstract=m["abstract"],
            attributes=tuple(m["attributes"]),
            compositions=tuple(m["compositions"]),
            association_ends=tuple(m["ends"]),
        )
        for name, m in members.items()
    )
    root = gm.productions[0].name if gm.productions else None
    return AstSchema(classes, root)


def validate_schema(schema: AstSchema, simple_refs=()) -> list[Diagnostic]:
    """Re-check all schema invariants; an empty list means consistent.

    ``simple_refs`` are the SimpleReferenceDecls whose attributes must be
    single-valued strings on their classes.
    """
    diags: list[Diagnostic] = []
    names = [c.name for c in schema.classes]
    for n in sorted({n for n in names if names.count(n) > 1}):
        diags.append(error("E-SCH-005", f"duplicate class '{n}'"))
    if schema.root_class is not None and schema.root_class not in schema:
        diags.append(error("E-SCH-002", f"root class '{schema.root_class}' does not exist"))

    for cls in schema.classes:
        if cls.super_class is not None:
            if cls.super_class not in schema:
                diags.append(error("E-SCH-002", f"{cls.name} extends unknown class '{cls.super_class}'"))
            elif schema.lineage(cls.name)[-1].super_class is not None:
                diags.append(error("E-SCH-006", f"superclass cycle through {cls.name}"))
        if cls.is_abstract and (cls.attributes or cls.compositions):
            diags.append(error("E-SCH-006", f"abstract class {cls.name} declares attributes or children"))
        roles = [r for c in schema.lineage(cls.name) for r in c.role_names()]
        for r in sorted({r for r in roles if roles.count(r) > 1}):
            diags.append(error("E-SCH-001", f"role '{r}' is declared more than once on {cls.name}"))
        for comp in cls.compositions:
            if comp.child_class not in schema:
                diags.append(
                    error("E-SCH-002", f"{cls.name}.{comp.role} references unknown class '{comp.child_class}'")
                )
        for end in cls.association_ends:
            if end.target_class not in schema:
                diags.append(
                    error("E-SCH-002", f"{cls.name}.{end.role} references unknown class '{end.target_class}'")
                )
                continue
            inverse = next(
                (e for e in schema.association_ends(end.target_class) if e.role == end.inverse_role), None
            )
            if (
                inverse is None
                or inverse.inverse_role != end.role
                or not schema.is_subclass(cls.name, inverse.target_class)
            ):
                diags.append(
                    error(
                        "E-SCH-003",
                        f"{cls.name}.{end.role} has no matching inverse "
                        f"'{end.inverse_role}' on {end.target_class}",
                    )
                )

    for ref in simple_refs:
        for cls_name, attr in ((ref.source_class, ref.source_attr), (ref.target_class, ref.target_attr)):
            if cls_name not in schema:
                diags.append(error("E-SCH-002", f"simplereference names unknown class '{cls_name}'", ref.span))
                continue
            a = next((a for a in schema.attributes(cls_name) if a.name == attr), None)
            if a is None or a.kind != STRING_KIND or a.multiplicity == LIST:
                diags.append(
                    error(
                        "E-SCH-004",
                        f"simplereference '{ref.role}' needs {cls_name}.{attr} to be a single string attribute",
                        ref.span,
                    )
                )
    return diags
