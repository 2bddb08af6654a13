import pytest
from hypothesis import given, strategies as st

from gramforge.diagnostics import LineIndex, Span, error, warning
from gramforge.lexing import (
    EOF,
    IDENT,
    INT,
    KEYWORD,
    PUNCT,
    STRING,
    LexError,
    escape_string,
    punct_table,
    scan,
    skip_trivia,
)

PUNCTS = punct_table(["<", "<<", "<->", "-", ">", ";"])


def kinds(text, keywords=frozenset()):
    out, pos = [], skip_trivia(text, 0)
    while True:
        tok = scan(text, pos, keywords, PUNCTS)
        if tok.kind == EOF:
            return out
        out.append((tok.kind, tok.text))
        pos = skip_trivia(text, tok.end)


def test_token_shapes():
    assert kinds('abc _x1 42 "s"') == [(IDENT, "abc"), (IDENT, "_x1"), (INT, "42"), (STRING, '"s"')]


def test_keywords_are_reserved():
    assert kinds("state stated", frozenset({"state"})) == [(KEYWORD, "state"), (IDENT, "stated")]


def test_longest_punctuation_wins():
    assert kinds("<-> << < -") == [(PUNCT, "<->"), (PUNCT, "<<"), (PUNCT, "<"), (PUNCT, "-")]


def test_comments_are_trivia():
    assert kinds("a // x\n /* y\n z */ b") == [(IDENT, "a"), (IDENT, "b")]


def test_string_escapes_decode():
    tok = scan(r'"a\"b\\c\nd\te"', 0, frozenset(), PUNCTS)
    assert tok.value == 'a"b\\c\nd\te'


@pytest.mark.parametrize(
    "text, code",
    [('"abc', "E-LEX-002"), ("/* open", "E-LEX-002"), ("$", "E-LEX-001"), (r'"\q"', "E-LEX-001")],
)
def test_lex_errors(text, code):
    with pytest.raises(LexError) as info:
        pos = skip_trivia(text, 0)
        scan(text, pos, frozenset(), PUNCTS)
    assert info.value.code == code


@given(st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=30))
def test_escape_string_round_trips(s):
    tok = scan(escape_string(s), 0, frozenset(), PUNCTS)
    assert tok.kind == STRING and tok.value == s


def test_line_index_spans_are_one_based():
    idx = LineIndex("ab\ncd", "f")
    assert idx.span(3, 5) == Span("f", 2, 1, 2, 3)
    assert idx.position(0) == (1, 1)


def test_diagnostic_format():
    d = error("E-X-001", "boom", Span("f.mcg", 3, 4, 3, 5))
    assert d.format() == "E-X-001 error f.mcg:3:4 boom"
    assert warning("W-X-1", "hm").format() == "W-X-1 warning - hm"
    assert d.is_error and not warning("W", "m").is_error
