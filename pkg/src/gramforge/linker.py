"""Resolution of ``simplereference`` declarations into association links.

For ``role: Src.a -> Tgt.b`` every ``Src`` node whose ``a`` value names
exactly one ``Tgt`` node (by its ``b`` value, searched over the whole model)
gets a link ``role`` to it, and the target gets the inverse link back.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from gramforge.diagnostics import Diagnostic, DiagnosticError, error, has_errors
from gramforge.grammar.roles import LIST, STRING_KIND
from gramforge.runtime.model import Model


@dataclass
class NameIndex:
    cls: str
    attr: str
    entries: dict[str, list[int]] = field(default_factory=dict)

    @property
    def key(self) -> tuple[str, str]:
        return self.cls, self.attr


def build_index(m: Model, cls: str, attr: str, schema=None) -> NameIndex:
    """Index the nodes of ``cls`` (and its subclasses, given a schema) by ``attr``.

    Raises:
        DiagnosticError: E-LNK-000 if ``attr`` is missing or not a
            single-valued string attribute.
    """
    classes = {cls}
    if schema is not None:
        a = next((a for a in schema.attributes(cls) if a.name == attr), None) if cls in schema else None
        if a is None or a.kind != STRING_KIND or a.multiplicity == LIST:
            raise DiagnosticError([error("E-LNK-000", f"{cls}.{attr} is not a single string attribute")])
        classes = set(schema.subclasses(cls))
    index = NameIndex(cls, attr)
    for node in m.nodes_of(classes):
        if attr not in node.attrs or not isinstance(node.attrs[attr], (str, type(None))):
            raise DiagnosticError(
                [error("E-LNK-000", f"{cls}.{attr} is not a single string attribute", node.span)]
            )
        value = node.attrs[attr]
        if value is not None:
            index.entries.setdefault(value, []).append(node.id)
    return index


def resolve_references(m: Model, lang) -> list[Diagnostic]:
    """Link every simple reference of ``lang`` in ``m``; all or nothing.

    Returns E-LNK-001 (unresolved) and E-LNK-002 (ambiguous) diagnostics;
    the model is modified only when none are produced.

    Raises:
        DiagnosticError: E-LNK-004 if the model already carries links.
    """
    if m.is_linked:
        raise DiagnosticError([error("E-LNK-004", "model is already linked")])
    schema = lang.schema
    diags: list[Diagnostic] = []
    plan: list[tuple[int, str, int, str]] = []
    indexes: dict[tuple[str, str], NameIndex] = {}
    for ref in lang.grammar.simple_refs:
        key = (ref.target_class, ref.target_attr)
        if key not in indexes:
            indexes[key] = build_index(m, *key, schema=schema)
        index = indexes[key]
        end = next(e for e in schema.association_ends(ref.source_class) if e.role == ref.role)
        for node in m.nodes_of(set(schema.subclasses(ref.source_class))):
            value = node.attrs.get(ref.source_attr)
            if value is None:
                continue
            hits = index.entries.get(value, [])
            span = node.attr_spans.get(ref.source_attr, node.span)
            if len(hits) == 1:
                plan.append((node.id, ref.role, hits[0], end.inverse_role))
            elif not hits:
                diags.append(
                    error(
                        "E-LNK-001",
                        f"unresolved reference '{value}': no {ref.target_class} with "
                        f"{ref.target_attr} '{value}' for {ref.source_class}.{ref.role}",
                        span,
                    )
                )
            else:
                where = ", ".join(
                    f"{m.nodes[h].span.start_line}:{m.nodes[h].span.start_col}" for h in hits
                )
                diags.append(
                    error(
                        "E-LNK-002",
                        f"ambiguous reference '{value}' for {ref.source_class}.{ref.role}: "
                        f"{len(hits)} candidates at {where}",
                        span,
                    )
                )
    if has_errors(diags):
        return diags
    for source, role, target, inverse in plan:
        m.nodes[source].links[role].append(target)
        m.nodes[target].links[inverse].append(source)
    return diags


def check_cardinalities(m: Model, lang) -> list[Diagnostic]:
    """Report every association end whose link count violates its multiplicity."""
    schema = lang.schema
    diags = []
    for node in m.nodes:
        for end in schema.association_ends(node.cls):
            count = len(node.links.get(end.role, ()))
            if not end.multiplicity.admits(count):
                diags.append(
                    error(
                        "E-LNK-003",
                        f"{node.cls}.{end.role} expects {end.multiplicity} link(s), found {count}",
                        node.span,
                    )
                )
    return diags
