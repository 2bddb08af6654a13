"""Self-contained, hash-verified compiled language artifacts (``.mclang``).

An artifact is canonical JSON: sorted keys, no insignificant whitespace,
UTF-8. Its ``hash`` field is the lowercase hex SHA-256 of the canonical
bytes of the artifact object without that field.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, replace

from gramforge.diagnostics import DiagnosticError, error, has_errors
from gramforge.grammar.checks import check_duplicates, check_flat
from gramforge.grammar.model import (
    Alternation,
    AssociationDecl,
    Cardinality,
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
)
from gramforge.composer.inheritance import flatten_inheritance
from gramforge.runtime.lexer import LexerSpec, LexRegion
from gramforge.schema import AstSchema, derive_schema, validate_schema

FORMAT_VERSION = 1


def canonical_bytes(obj) -> bytes:
    return json.dumps(
        obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False
    ).encode("utf-8")


@dataclass(frozen=True)
class CompiledLanguage:
    name: str
    grammar: GrammarModel
    schema: AstSchema
    lexer: LexerSpec
    holes: frozenset[str]
    regions: tuple[LexRegion, ...] = ()
    format_version: int = FORMAT_VERSION
    content_hash: str = ""

    def payload(self) -> dict:
        """The artifact object without its hash."""
        return {
            "formatVersion": self.format_version,
            "name": self.name,
            "grammar": grammar_to_json(self.grammar),
            "schema": self.schema.to_json(),
            "lexer": {**self.lexer.to_json(), "regions": [r.to_json() for r in self.regions]},
            "holes": sorted(self.holes),
        }

    def rehash(self) -> "CompiledLanguage":
        digest = hashlib.sha256(canonical_bytes(self.payload())).hexdigest()
        return replace(self, content_hash=digest)


def compile_language(gm: GrammarModel, supers=None) -> CompiledLanguage:
    """Flatten, check, derive the schema and package a language.

    Raises:
        DiagnosticError: carrying every error diagnostic from flattening,
            grammar checks and schema derivation/validation.
    """
    diags = check_duplicates(gm)
    flat = flatten_inheritance(gm, supers)
    diags += check_flat(flat)
    if has_errors(diags):
        raise DiagnosticError(diags)
    schema = derive_schema(flat)
    diags = validate_schema(schema, flat.simple_refs)
    if has_errors(diags):
        raise DiagnosticError(diags)
    return CompiledLanguage(
        name=flat.name,
        grammar=flat,
        schema=schema,
        lexer=LexerSpec.from_grammar(flat),
        holes=frozenset(flat.externals),
    ).rehash()


def serialize_language(cl: CompiledLanguage) -> bytes:
    return canonical_bytes({**cl.payload(), "hash": cl.content_hash})


_HASH_FIELD = re.compile(rb'"hash":"([0-9a-f]{64})",')
_ARTIFACT_PREFIX = b'{"formatVersion":'


def load_language(data: bytes) -> CompiledLanguage:
    """Load and verify an artifact produced by :func:`serialize_language`.

    The hash is checked over the raw bytes first, so any single-byte change
    to an artifact is reported as an integrity failure.

    Raises:
        DiagnosticError: E-CMP-010 unsupported format version, E-CMP-011
            hash mismatch, E-CMP-012 malformed artifact.
    """
    data = bytes(data)
    m = _HASH_FIELD.search(data)
    if m is None:
        if data.startswith(_ARTIFACT_PREFIX):
            raise DiagnosticError([error("E-CMP-011", "artifact content hash is missing or damaged")])
        raise DiagnosticError([error("E-CMP-012", "not a compiled language artifact")])
    body = data[: m.start()] + data[m.end():]
    claimed = m.group(1).decode("ascii")
    if hashlib.sha256(body).hexdigest() != claimed:
        raise DiagnosticError([error("E-CMP-011", "artifact content hash mismatch")])
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise DiagnosticError([error("E-CMP-012", f"malformed artifact: {exc}")]) from None
    if not isinstance(doc, dict) or not isinstance(doc.get("formatVersion"), int):
        raise DiagnosticError([error("E-CMP-012", "malformed artifact: no formatVersion")])
    if doc["formatVersion"] != FORMAT_VERSION:
        raise DiagnosticError(
            [error("E-CMP-010", f"unsupported artifact format version {doc['formatVersion']}")]
        )
    if canonical_bytes(doc) != data:
        raise DiagnosticError([error("E-CMP-012", "malformed artifact: not in canonical form")])
    try:
        lexer = doc["lexer"]
        cl = CompiledLanguage(
            name=doc["name"],
            grammar=grammar_from_json(doc["grammar"]),
            schema=AstSchema.from_json(doc["schema"]),
            lexer=LexerSpec.from_json(lexer),
            holes=frozenset(doc["holes"]),
            regions=tuple(LexRegion.from_json(r) for r in lexer["regions"]),
            format_version=doc["formatVersion"],
            content_hash=doc["hash"],
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise DiagnosticError([error("E-CMP-012", f"malformed artifact: {exc!r}")]) from None
    return cl


# -- grammar JSON codec --------------------------------------------------------


def expr_to_json(e) -> dict:
    if isinstance(e, Terminal):
        return {"t": "terminal", "text": e.text}
    if isinstance(e, TokenRef):
        return {"t": "token", "kind": e.kind, "label": e.label}
    if isinstance(e, NonterminalRef):
        return {"t": "ref", "target": e.target, "label": e.label}
    if isinstance(e, ConstantFlag):
        return {"t": "flag", "label": e.label, "keyword": e.keyword}
    if isinstance(e, Sequence):
        return {"t": "seq", "items": [expr_to_json(i) for i in e.items]}
    if isinstance(e, Alternation):
        return {"t": "alt", "alts": [expr_to_json(a) for a in e.alts]}
    if isinstance(e, Repetition):
        return {"t": "rep", "min": e.min, "inner": expr_to_json(e.inner)}
    if isinstance(e, Optional):
        return {"t": "opt", "inner": expr_to_json(e.inner)}
    raise TypeError(e)


def expr_from_json(d: dict):
    t = d["t"]
    if t == "terminal":
        return Terminal(d["text"])
    if t == "token":
        return TokenRef(d["kind"], d["label"])
    if t == "ref":
        return NonterminalRef(d["target"], d["label"])
    if t == "flag":
        return ConstantFlag(d["label"], d["keyword"])
    if t == "seq":
        return Sequence(tuple(expr_from_json(i) for i in d["items"]))
    if t == "alt":
        return Alternation(tuple(expr_from_json(a) for a in d["alts"]))
    if t == "rep":
        return Repetition(expr_from_json(d["inner"]), d["min"])
    if t == "opt":
        return Optional(expr_from_json(d["inner"]))
    raise ValueError(f"unknown expression tag {t!r}")


def grammar_to_json(gm: GrammarModel) -> dict:
    return {
        "name": gm.name,
        "superGrammars": list(gm.super_grammars),
        "productions": [{"name": p.name, "body": expr_to_json(p.body)} for p in gm.productions],
        "externals": list(gm.externals),
        "associations": [
            {
                "leftClass": a.left_class,
                "leftRole": a.left_role,
                "leftCard": str(a.left_card),
                "rightClass": a.right_class,
                "rightRole": a.right_role,
                "rightCard": str(a.right_card),
            }
            for a in gm.associations
        ],
        "simpleRefs": [
            {
                "role": r.role,
                "sourceClass": r.source_class,
                "sourceAttr": r.source_attr,
                "targetClass": r.target_class,
                "targetAttr": r.target_attr,
            }
            for r in gm.simple_refs
        ],
    }


def grammar_from_json(d: dict) -> GrammarModel:
    return GrammarModel(
        name=d["name"],
        super_grammars=tuple(d["superGrammars"]),
        productions=tuple(Production(p["name"], expr_from_json(p["body"])) for p in d["productions"]),
        externals=tuple(d["externals"]),
        associations=tuple(
            AssociationDecl(
                a["leftClass"], a["leftRole"], Cardinality.parse(a["leftCard"]),
                a["rightClass"], a["rightRole"], Cardinality.parse(a["rightCard"]),
            )
            for a in d["associations"]
        ),
        simple_refs=tuple(
            SimpleReferenceDecl(
                r["role"], r["sourceClass"], r["sourceAttr"], r["targetClass"], r["targetAttr"]
            )
            for r in d["simpleRefs"]
        ),
    )
