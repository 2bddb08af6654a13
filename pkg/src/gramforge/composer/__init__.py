"""Inheritance flattening, compiled artifacts and fragment composition."""

from gramforge.composer.artifact import (
    FORMAT_VERSION,
    CompiledLanguage,
    compile_language,
    load_language,
    serialize_language,
)
from gramforge.composer.compose import CompositionBinding, analyze_composition, check_bindings, compose
from gramforge.composer.inheritance import flatten_inheritance

__all__ = [
    "FORMAT_VERSION",
    "CompiledLanguage",
    "CompositionBinding",
    "analyze_composition",
    "check_bindings",
    "compile_language",
    "compose",
    "flatten_inheritance",
    "load_language",
    "serialize_language",
]
