"""Grammar definition files: model, parser, printer and checks."""

from gramforge.grammar.checks import check_grammar
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
from gramforge.grammar.parser import parse_grammar
from gramforge.grammar.printer import format_expr, format_grammar

__all__ = [
    "Alternation",
    "AssociationDecl",
    "Cardinality",
    "ConstantFlag",
    "GrammarModel",
    "NonterminalRef",
    "Optional",
    "Production",
    "Repetition",
    "Sequence",
    "SimpleReferenceDecl",
    "Terminal",
    "TokenRef",
    "check_grammar",
    "format_expr",
    "format_grammar",
    "parse_grammar",
]
