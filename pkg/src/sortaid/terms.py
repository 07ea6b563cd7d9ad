"""Symbolic terms and the s-expression reader/printer.

Terms are the lingua franca of the engine: facts, rules, preferences,
plans and explanations are all made of them.  The grammar is tiny:

    term     := atom | variable | integer | text | '(' functor term+ ')'
    atom     := bare token, case sensitive          e.g.  Levodopa
    variable := '?' followed by a token             e.g.  ?pill
    integer  := optional '-' and digits only        e.g.  -1, 42
    text     := single-quoted, spaces allowed       e.g.  'business day'

Inside quoted text, ``\\'`` and ``\\\\`` escape the quote and the
backslash.  A token such as ``1pm`` (digits followed by letters) is an
ordinary atom; only all-digit tokens lex as integers.

``parse_term`` and ``format_term`` are exact inverses for every
representable value; the test suite checks this round trip on random
terms.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

from .errors import (
    DanglingInput,
    EmptyExpression,
    TermError,
    UnbalancedParens,
    UnterminatedString,
)

__all__ = [
    "Atom",
    "Variable",
    "Integer",
    "Text",
    "Compound",
    "Term",
    "parse_term",
    "parse_terms",
    "format_term",
    "term_atoms",
    "term_variables",
    "is_ground",
]


@dataclass(frozen=True)
class Atom:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Variable:
    name: str  # stored without the leading '?'

    def __str__(self) -> str:
        return "?" + self.name


@dataclass(frozen=True)
class Integer:
    value: int

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class Text:
    value: str

    def __str__(self) -> str:
        escaped = self.value.replace("\\", "\\\\").replace("'", "\\'")
        return f"'{escaped}'"


@dataclass(frozen=True)
class Compound:
    functor: str
    args: tuple["Term", ...]

    def __str__(self) -> str:
        inner = " ".join(str(a) for a in self.args)
        return f"({self.functor} {inner})"


Term = Union[Atom, Variable, Integer, Text, Compound]

_INTEGER_RE = re.compile(r"-?[0-9]+\Z")
_DELIMS = "()'"
_WS = " \t\r\n"


@dataclass(frozen=True)
class _Token:
    kind: str  # "(", ")", "symbol", "text"
    value: str
    pos: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in _WS:
            i += 1
        elif c in "()":
            tokens.append(_Token(c, c, i))
            i += 1
        elif c == "'":
            chars: list[str] = []
            j = i + 1
            while True:
                if j >= n:
                    raise UnterminatedString(f"unterminated string starting at {i}")
                ch = text[j]
                if ch == "\\":
                    if j + 1 >= n:
                        raise UnterminatedString(f"unterminated string starting at {i}")
                    chars.append(text[j + 1])
                    j += 2
                elif ch == "'":
                    break
                else:
                    chars.append(ch)
                    j += 1
            tokens.append(_Token("text", "".join(chars), i))
            i = j + 1
        else:
            j = i
            while j < n and text[j] not in _WS and text[j] not in _DELIMS:
                j += 1
            tokens.append(_Token("symbol", text[i:j], i))
            i = j
    return tokens


def _classify(token: _Token) -> Term:
    value = token.value
    if _INTEGER_RE.match(value):
        return Integer(int(value))
    if value.startswith("?"):
        if len(value) == 1:
            raise TermError(f"bare '?' at {token.pos} is not a variable name")
        return Variable(value[1:])
    return Atom(value)


def _parse(tokens: list[_Token], pos: int) -> tuple[Term, int]:
    if pos >= len(tokens):
        raise UnbalancedParens("unexpected end of input")
    tok = tokens[pos]
    if tok.kind == "(":
        pos += 1
        if pos < len(tokens) and tokens[pos].kind == ")":
            raise EmptyExpression(f"empty expression at {tok.pos}")
        if pos >= len(tokens):
            raise UnbalancedParens("missing ')'")
        head = tokens[pos]
        if head.kind != "symbol":
            raise TermError(f"functor must be a bare token at {head.pos}")
        if head.value.startswith("?"):
            raise TermError(f"functor may not be a variable at {head.pos}")
        if _INTEGER_RE.match(head.value):
            raise TermError(f"functor may not be an integer at {head.pos}")
        pos += 1
        args: list[Term] = []
        while True:
            if pos >= len(tokens):
                raise UnbalancedParens("missing ')'")
            if tokens[pos].kind == ")":
                if not args:
                    raise TermError(
                        f"compound '({head.value})' needs at least one argument"
                    )
                return Compound(head.value, tuple(args)), pos + 1
            arg, pos = _parse(tokens, pos)
            args.append(arg)
    if tok.kind == ")":
        raise UnbalancedParens(f"unexpected ')' at {tok.pos}")
    if tok.kind == "text":
        return Text(tok.value), pos + 1
    return _classify(tok), pos + 1


def parse_term(text: str) -> Term:
    """Parse exactly one s-expression; trailing tokens are an error."""
    tokens = _tokenize(text)
    if not tokens:
        raise EmptyExpression("no expression in input")
    term, pos = _parse(tokens, 0)
    if pos != len(tokens):
        raise DanglingInput(f"trailing input at {tokens[pos].pos}")
    return term


def parse_terms(text: str) -> list[Term]:
    """Parse a whitespace-separated sequence of s-expressions."""
    tokens = _tokenize(text)
    terms: list[Term] = []
    pos = 0
    while pos < len(tokens):
        term, pos = _parse(tokens, pos)
        terms.append(term)
    return terms


def format_term(term: Term) -> str:
    return str(term)


def term_atoms(term: Term) -> Iterator[str]:
    """All atom names and text values occurring in the term."""
    if isinstance(term, Atom):
        yield term.name
    elif isinstance(term, Text):
        yield term.value
    elif isinstance(term, Compound):
        for arg in term.args:
            yield from term_atoms(arg)


def term_variables(term: Term) -> Iterator[str]:
    if isinstance(term, Variable):
        yield term.name
    elif isinstance(term, Compound):
        for arg in term.args:
            yield from term_variables(arg)


def is_ground(term: Term) -> bool:
    return next(term_variables(term), None) is None
