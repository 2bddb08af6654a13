"""Template rendering over linked models."""

from __future__ import annotations

from typing import Callable, Mapping, Union

from gramforge.codegen.template import Foreach, If, Include, Interp, Literal, Template
from gramforge.diagnostics import DiagnosticError, error
from gramforge.grammar.roles import LIST, OPTIONAL
from gramforge.runtime.model import Model, Node
from gramforge.schema import Attribute, Composition

MAX_INCLUDE_DEPTH = 64

TemplateLibrary = Union[Mapping[str, Template], Callable[[str], "Template | None"]]


def _lookup(templates: TemplateLibrary | None, name: str) -> Template | None:
    if templates is None:
        return None
    if isinstance(templates, Mapping):
        return templates.get(name)
    return templates(name)


class Renderer:
    """Evaluates paths and renders templates against one model."""

    def __init__(self, m: Model, lang, templates: TemplateLibrary | None = None) -> None:
        self.model = m
        self.schema = lang.schema
        self.templates = templates

    def eval_path(self, path: tuple[str, ...], node: Node, scope: dict, span=None):
        """Evaluate a path to a string, bool, Node, list, or None (absent).

        A leading segment naming a bound loop variable starts from that
        variable; otherwise evaluation starts at the current node.
        """
        if path[0] in scope:
            value, rest = scope[path[0]], path[1:]
        else:
            value, rest = node, path
        for seg in rest:
            value = self._step(value, seg, path, span)
        return value

    def _step(self, value, seg: str, path, span):
        if value is None:
            return None
        if not isinstance(value, Node):
            raise DiagnosticError(
                [error("E-GEN-010", f"cannot select '{seg}' in {'.'.join(path)}: not a node", span)]
            )
        member = self.schema.member(value.cls, seg)
        if member is None:
            raise DiagnosticError(
                [error("E-GEN-010", f"unknown path segment '{seg}' on {value.cls} in {'.'.join(path)}", span)]
            )
        nodes = self.model.nodes
        if isinstance(member, Attribute):
            return value.attrs.get(seg)
        if isinstance(member, Composition):
            ids = value.children.get(seg, [])
            if member.multiplicity == LIST:
                return [nodes[i] for i in ids]
            if member.multiplicity == OPTIONAL:
                return nodes[ids[0]] if ids else None
            return nodes[ids[0]]
        ids = value.links.get(seg, [])
        if member.multiplicity.upper == 1:
            return nodes[ids[0]] if ids else None
        return [nodes[i] for i in ids]

    def render(self, template: Template, node: Node, depth: int = 0) -> str:
        out: list[str] = []
        self._render_body(template.body, node, {}, depth, out)
        return "".join(out)

    def _render_body(self, body, node: Node, scope: dict, depth: int, out: list[str]) -> None:
        for seg in body:
            if isinstance(seg, Literal):
                out.append(seg.text)
            elif isinstance(seg, Interp):
                value = self.eval_path(seg.path, node, scope, seg.span)
                if isinstance(value, bool):
                    out.append("true" if value else "false")
                elif isinstance(value, str):
                    out.append(value)
                else:
                    raise DiagnosticError(
                        [error("E-GEN-011", f"cannot interpolate {_describe(value)} '{'.'.join(seg.path)}'", seg.span)]
                    )
            elif isinstance(seg, Foreach):
                value = self.eval_path(seg.path, node, scope, seg.span)
                if value is None:
                    items = []
                elif isinstance(value, Node):
                    items = [value]
                elif isinstance(value, list):
                    items = value
                else:
                    raise DiagnosticError(
                        [error("E-GEN-011", f"cannot iterate {_describe(value)} '{'.'.join(seg.path)}'", seg.span)]
                    )
                for item in items:
                    self._render_body(seg.body, node, {**scope, seg.var: item}, depth, out)
            elif isinstance(seg, If):
                value = self.eval_path(seg.path, node, scope, seg.span)
                if _truthy(value):
                    self._render_body(seg.then_body, node, scope, depth, out)
                elif seg.else_body is not None:
                    self._render_body(seg.else_body, node, scope, depth, out)
            elif isinstance(seg, Include):
                template = _lookup(self.templates, seg.template_name)
                if template is None:
                    raise DiagnosticError(
                        [error("E-GEN-012", f"unknown template '{seg.template_name}'", seg.span)]
                    )
                if depth + 1 > MAX_INCLUDE_DEPTH:
                    raise DiagnosticError(
                        [error("E-GEN-013", f"include depth exceeds {MAX_INCLUDE_DEPTH}", seg.span)]
                    )
                value = self.eval_path(seg.path, node, scope, seg.span)
                if value is None:
                    continue
                if not isinstance(value, Node):
                    raise DiagnosticError(
                        [error("E-GEN-011", f"@include needs a node, got {_describe(value)}", seg.span)]
                    )
                self._render_body(template.body, value, {}, depth + 1, out)


def _truthy(value) -> bool:
    if isinstance(value, (bool, str, list)):
        return bool(value)
    return value is not None


def _describe(value) -> str:
    if value is None:
        return "absent value"
    if isinstance(value, Node):
        return "node"
    if isinstance(value, list):
        return "list"
    return type(value).__name__


def render(t: Template, node: int, m: Model, lang, templates: TemplateLibrary | None = None) -> str:
    """Render ``t`` with node ``node`` of ``m`` as the current node.

    Raises:
        DiagnosticError: E-GEN-010 unknown path segment, E-GEN-011 value of
            the wrong kind, E-GEN-012 unknown include, E-GEN-013 include
            recursion deeper than 64.
    """
    return Renderer(m, lang, templates).render(t, m.nodes[node])
