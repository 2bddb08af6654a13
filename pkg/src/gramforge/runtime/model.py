"""Typed syntax trees produced by the model parser."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from gramforge.diagnostics import Span


@dataclass
class Node:
    id: int
    cls: str
    attrs: dict
    children: dict[str, list[int]]
    links: dict[str, list[int]]
    span: Span
    # spans of string attribute lexemes, used for linker diagnostics
    attr_spans: dict = field(default_factory=dict, compare=False, repr=False)


@dataclass
class Model:
    nodes: list[Node]
    root: int
    language_hash: str

    def node(self, node_id: int) -> Node:
        return self.nodes[node_id]

    def nodes_of(self, classes) -> list[Node]:
        """Nodes whose class is in ``classes``, in pre-order."""
        if isinstance(classes, str):
            classes = {classes}
        return [self.nodes[i] for i in traverse(self) if self.nodes[i].cls in classes]

    @property
    def is_linked(self) -> bool:
        return any(ids for n in self.nodes for ids in n.links.values())


def _child_ids(node: Node) -> list[int]:
    return [c for ids in node.children.values() for c in ids]


def traverse(m: Model, order: str = "pre") -> list[int]:
    """Depth-first node ids; children by composition role order, then source order.

    Association links are not followed.
    """
    if order not in ("pre", "post"):
        raise ValueError(f"order must be 'pre' or 'post', not {order!r}")
    out = []
    if order == "pre":
        stack = [m.root]
        while stack:
            nid = stack.pop()
            out.append(nid)
            stack.extend(reversed(_child_ids(m.nodes[nid])))
        return out
    stack = [(m.root, False)]
    while stack:
        nid, expanded = stack.pop()
        if expanded:
            out.append(nid)
            continue
        stack.append((nid, True))
        stack.extend((c, False) for c in reversed(_child_ids(m.nodes[nid])))
    return out


def model_to_json(m: Model) -> str:
    """Canonical JSON with nodes renumbered in pre-order."""
    order = traverse(m, "pre")
    renum = {old: new for new, old in enumerate(order)}
    nodes = []
    for old in order:
        n = m.nodes[old]
        nodes.append(
            {
                "id": renum[old],
                "class": n.cls,
                "attrs": n.attrs,
                "children": {r: [renum[i] for i in ids] for r, ids in n.children.items()},
                "links": {r: [renum[i] for i in ids] for r, ids in n.links.items()},
                "span": n.span.to_json(),
            }
        )
    doc = {"language": m.language_hash, "root": renum[m.root], "nodes": nodes}
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
