"""Tokenizer: token stream shape, comments, patch markers, errors."""
import pytest

from mvl.errors import MvlSyntaxError
from mvl.lexer import PATCH_MARKER, tokenize


def kinds_values(source):
    tokens, _ = tokenize(source)
    return [(t.kind, t.value) for t in tokens]


def test_simple_statement_stream():
    assert kinds_values("x := 1;") == [
        ("ident", "x"), ("op", ":="), ("int", "1"), ("op", ";"), ("eof", ""),
    ]

def test_keywords_are_distinguished_from_identifiers():
    tokens, _ = tokenize("while whiles")
    assert tokens[0].kind == "keyword"
    assert tokens[1].kind == "ident"


def test_multi_char_operators_lex_greedily():
    ops = [v for k, v in kinds_values("a ==> b <= c == d != e >= f && g || h")
           if k == "op"]
    assert ops == ["==>", "<=", "==", "!=", ">=", "&&", "||"]


def test_line_and_column_positions():
    tokens, _ = tokenize("x\n  y := 2;")
    assert (tokens[0].line, tokens[0].col) == (1, 1)
    assert (tokens[1].line, tokens[1].col) == (2, 3)


def test_plain_comments_are_skipped():
    assert kinds_values("x // whole trailing comment\n:= 1;") == kinds_values("x := 1;")


def test_patch_marker_records_line_and_is_skipped():
    tokens, markers = tokenize("a := 1; %s\nb := 2;" % PATCH_MARKER)
    assert markers == {1}
    assert all(t.value != "pr" for t in tokens)


def test_marker_must_match_exactly():
    _, markers = tokenize("a := 1; // pr {:trustedX}\n")
    assert markers == set()


def test_array_type_tokens():
    vals = [v for _, v in kinds_values("a: array<int>")]
    assert "array" in vals and "<" in vals and ">" in vals


def test_dotted_length_access():
    assert ("op", ".") in kinds_values("arr.Length")


def test_unknown_character_raises_with_position():
    with pytest.raises(MvlSyntaxError) as exc:
        tokenize("x := $;")
    assert "line 1" in str(exc.value)


def test_empty_source_is_just_eof():
    tokens, markers = tokenize("")
    assert [t.kind for t in tokens] == ["eof"]
    assert markers == set()
