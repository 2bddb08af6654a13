"""gramforge: a grammar-based language workbench.

A single grammar file yields a model parser, a typed abstract syntax
schema with associations, a reference linker and a template-driven code
generator. Languages compile to hash-verified artifacts that can be
extended by inheritance and composed through external holes.
"""

from gramforge.codegen import parse_template, render, run_workflow
from gramforge.composer import (
    CompiledLanguage,
    CompositionBinding,
    analyze_composition,
    compile_language,
    compose,
    flatten_inheritance,
    load_language,
    serialize_language,
)
from gramforge.diagnostics import Diagnostic, DiagnosticError, Span
from gramforge.grammar import check_grammar, parse_grammar
from gramforge.linker import check_cardinalities, resolve_references
from gramforge.runtime import Model, Node, model_to_json, parse_model, tokenize_model, traverse
from gramforge.schema import AstSchema, derive_schema

__version__ = "0.1.0"

__all__ = [
    "AstSchema",
    "CompiledLanguage",
    "CompositionBinding",
    "Diagnostic",
    "DiagnosticError",
    "Model",
    "Node",
    "Span",
    "analyze_composition",
    "check_cardinalities",
    "check_grammar",
    "compile_language",
    "compose",
    "derive_schema",
    "flatten_inheritance",
    "load_language",
    "model_to_json",
    "parse_grammar",
    "parse_model",
    "parse_template",
    "render",
    "resolve_references",
    "run_workflow",
    "serialize_language",
    "tokenize_model",
    "traverse",
]
