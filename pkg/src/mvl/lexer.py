"""Tokenizer for MVL source text."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Set, Tuple

from .errors import MvlSyntaxError

KEYWORDS = {
    "method", "returns", "requires", "ensures", "invariant", "decreases",
    "var", "if", "else", "while", "for", "to", "break", "assert", "assume",
    "true", "false", "forall", "exists", "int", "bool", "array", "new",
}

# Multi-character operators first so maximal munch wins.
OPERATORS = [
    "==>", "::", ":=", "==", "!=", "<=", ">=", "&&", "||",
    "<", ">", "+", "-", "*", "/", "%", "!", "=",
    ".", ",", ";", ":", "(", ")", "{", "}", "[", "]",
]

PATCH_MARKER = "// pr {:trusted}"


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "int" | "keyword" | "op" | "eof"
    value: str
    line: int
    col: int


def tokenize(source: str) -> Tuple[List[Token], Set[int]]:
    """Split source into tokens.

    Returns the token list plus the set of line numbers whose trailing
    comment is exactly the patched-line marker `// pr {:trusted}`.
    """
    tokens: List[Token] = []
    marker_lines: Set[int] = set()
    line = 1
    col = 1
    i = 0
    n = len(source)
    while i < n:
        c = source[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if c in " \t\r":
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            j = source.find("\n", i)
            if j == -1:
                j = n
            comment = source[i:j].rstrip()
            if comment == PATCH_MARKER:
                marker_lines.add(line)
            col += j - i
            i = j
            continue
        if c.isdigit():
            j = i
            while j < n and source[j].isdigit():
                j += 1
            tokens.append(Token("int", source[i:j], line, col))
            col += j - i
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            word = source[i:j]
            kind = "keyword" if word in KEYWORDS else "ident"
            tokens.append(Token(kind, word, line, col))
            col += j - i
            i = j
            continue
        for op in OPERATORS:
            if source.startswith(op, i):
                tokens.append(Token("op", op, line, col))
                col += len(op)
                i += len(op)
                break
        else:
            raise MvlSyntaxError("unexpected character %r" % c, line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens, marker_lines


__all__ = ["Token", "tokenize", "KEYWORDS", "PATCH_MARKER"]
