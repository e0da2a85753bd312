"""Parser for the polynomial text syntax.

Accepted forms: identifiers for variables, ``^`` for powers, optional
``*`` between factors (``2y^2`` works), integer or ``p/q`` rational
coefficients, parentheses, unary minus.  ``parse(print(f)) == f``
bit-exactly for every polynomial the printer emits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from gmpy2 import mpq

from .algebra import Polynomial, PolyRing


class ParseError(ValueError):
    """Syntax error with position and the token set that was expected."""

    def __init__(self, message: str, line: int, column: int, expected=(), found: str = ""):
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        self.found = found
        loc = f"line {line}, column {column}"
        if expected:
            message = f"{message} at {loc} (expected {', '.join(expected)}; found {found!r})"
        else:
            message = f"{message} at {loc}"
        super().__init__(message)


@dataclass(frozen=True)
class Token:
    kind: str  # NUM, IDENT, OP, END
    text: str
    line: int
    column: int


_OPS = set("+-*^()/,;=[]:.")


def tokenize(text: str, line: int = 1, column: int = 1):
    """Tokenize; positions are 1-based and honour embedded newlines."""
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            column = 1
            i += 1
            continue
        if ch in " \t\r":
            column += 1
            i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("NUM", text[i:j], line, column))
            column += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(Token("IDENT", text[i:j], line, column))
            column += j - i
            i = j
            continue
        if ch in _OPS:
            tokens.append(Token("OP", ch, line, column))
            column += 1
            i += 1
            continue
        raise ParseError("unexpected character", line, column, ("token",), ch)
    tokens.append(Token("END", "", line, column))
    return tokens


class TokenStream:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def next(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "END":
            self.pos += 1
        return tok

    def accept_op(self, *ops: str) -> Optional[Token]:
        tok = self.peek()
        if tok.kind == "OP" and tok.text in ops:
            return self.next()
        return None

    def expect_op(self, *ops: str) -> Token:
        tok = self.peek()
        if tok.kind == "OP" and tok.text in ops:
            return self.next()
        raise ParseError("syntax error", tok.line, tok.column,
                         tuple(f"'{o}'" for o in ops), tok.text or "end of input")

    def expect(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind == kind:
            return self.next()
        raise ParseError("syntax error", tok.line, tok.column, (what,),
                         tok.text or "end of input")


class PolynomialParser:
    """Recursive-descent parser over a fixed ring."""

    def __init__(self, ring: PolyRing):
        self.ring = ring

    def parse(self, stream: TokenStream) -> Polynomial:
        return self._expr(stream)

    def parse_text(self, text: str, line: int = 1, column: int = 1) -> Polynomial:
        stream = TokenStream(tokenize(text, line, column))
        poly = self._expr(stream)
        tok = stream.peek()
        if tok.kind != "END":
            raise ParseError("trailing input", tok.line, tok.column,
                             ("end of input",), tok.text)
        return poly

    # expr := ['-'|'+'] term (('+'|'-') term)*
    def _expr(self, s: TokenStream) -> Polynomial:
        sign = 1
        while True:
            tok = s.accept_op("+", "-")
            if tok is None:
                break
            if tok.text == "-":
                sign = -sign
        out = self._term(s) * sign
        while True:
            tok = s.accept_op("+", "-")
            if tok is None:
                return out
            sign = 1 if tok.text == "+" else -1
            while True:
                extra = s.accept_op("+", "-")
                if extra is None:
                    break
                if extra.text == "-":
                    sign = -sign
            out = out + self._term(s) * sign

    # term := factor (['*'] factor)*
    def _term(self, s: TokenStream) -> Polynomial:
        out = self._factor(s)
        while True:
            if s.accept_op("*"):
                out = out * self._factor(s)
                continue
            tok = s.peek()
            if tok.kind in ("NUM", "IDENT") or (tok.kind == "OP" and tok.text == "("):
                out = out * self._factor(s)
                continue
            return out

    # factor := base ['^' NUM]
    def _factor(self, s: TokenStream) -> Polynomial:
        base = self._base(s)
        if s.accept_op("^"):
            tok = s.expect("NUM", "exponent")
            return base ** int(tok.text)
        return base

    # base := NUM ['/' NUM] | IDENT | '(' expr ')'
    def _base(self, s: TokenStream) -> Polynomial:
        tok = s.peek()
        if tok.kind == "NUM":
            s.next()
            num = int(tok.text)
            if s.accept_op("/"):
                den_tok = s.expect("NUM", "denominator")
                den = int(den_tok.text)
                if den == 0:
                    raise ParseError("zero denominator", den_tok.line, den_tok.column)
                return self.ring.constant(mpq(num, den))
            return self.ring.constant(num)
        if tok.kind == "IDENT":
            s.next()
            try:
                idx = self.ring.var_index(tok.text)
            except KeyError:
                raise ParseError("unknown variable", tok.line, tok.column,
                                 ("declared variable",), tok.text) from None
            return self.ring.var(idx)
        if tok.kind == "OP" and tok.text == "(":
            s.next()
            inner = self._expr(s)
            s.expect_op(")")
            return inner
        raise ParseError("syntax error", tok.line, tok.column,
                         ("number", "variable", "'('"), tok.text or "end of input")


def parse_polynomial(text: str, ring: PolyRing) -> Polynomial:
    return PolynomialParser(ring).parse_text(text)


def parse_matrix_rows(stream: TokenStream, ring: PolyRing):
    """Parse ``[[f,g],[h,k]]``: rows in brackets, comma-separated entries."""
    parser = PolynomialParser(ring)
    stream.expect_op("[")
    rows = []
    while True:
        stream.expect_op("[")
        row = [parser.parse(stream)]
        while stream.accept_op(","):
            row.append(parser.parse(stream))
        stream.expect_op("]")
        rows.append(row)
        if not stream.accept_op(","):
            break
    closing = stream.expect_op("]")
    width = len(rows[0])
    for row in rows:
        if len(row) != width:
            raise ParseError("ragged matrix rows", closing.line, closing.column)
    return rows


def parse_matrix(text: str, ring: PolyRing):
    stream = TokenStream(tokenize(text))
    rows = parse_matrix_rows(stream, ring)
    tok = stream.peek()
    if tok.kind != "END":
        raise ParseError("trailing input", tok.line, tok.column,
                         ("end of input",), tok.text)
    return rows
