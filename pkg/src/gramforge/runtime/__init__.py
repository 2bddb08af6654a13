"""Model lexing, packrat parsing, traversal and JSON export."""

from gramforge.runtime.lexer import LexerSpec, LexRegion, tokenize_model
from gramforge.runtime.model import Model, Node, model_to_json, traverse
from gramforge.runtime.parser import parse_model

__all__ = [
    "LexRegion",
    "LexerSpec",
    "Model",
    "Node",
    "model_to_json",
    "parse_model",
    "tokenize_model",
    "traverse",
]
