"""Recursive-descent parser for polynomial expressions.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*' factor) | ('/' INT))*
    factor := base ('^' UINT)?
    base   := VAR | RATIONAL | INT | '(' expr ')' | '-' factor

``RATIONAL`` is a decimal literal such as ``6.527``.  Division is only
allowed by a nonzero integer literal, which keeps every input polynomial.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from gmpy2 import mpq

from .poly import MultiPoly


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d+)?|\.\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))")


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(text: str, line: int, col0: int) -> list:
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            ws = len(text[pos:]) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[pos + ws]!r}", line, col0 + pos + ws)
        kind = m.lastgroup
        start = m.start(kind)
        out.append(_Tok(kind, m.group(kind), col0 + start))
        pos = m.end()
    out.append(_Tok("end", "", col0 + len(text.rstrip())))
    return out


def _number(text: str) -> mpq:
    if "." in text:
        whole, frac = text.split(".")
        return mpq(int(whole or "0")) + mpq(int(frac), 10 ** len(frac))
    return mpq(int(text))


class _Parser:
    def __init__(self, text: str, ring: tuple, line: int, col0: int):
        self.toks = _tokenize(text, line, col0)
        self.i = 0
        self.ring = ring
        self.line = line

    def peek(self) -> _Tok:
        return self.toks[self.i]

    def take(self) -> _Tok:
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.line, tok.col)

    def expect(self, text):
        t = self.peek()
        if t.text != text or t.kind != "op":
            self.error(f"expected {text!r}, found {t.text or 'end of input'!r}")
        return self.take()

    def parse(self):
        if self.peek().kind == "end":
            self.error("empty expression")
        value, factors = self.expr(top=True)
        if self.peek().kind != "end":
            self.error(f"unexpected {self.peek().text!r}")
        return value, factors

    def expr(self, top=False):
        value, factors = self.term()
        multi = False
        while self.peek().kind == "op" and self.peek().text in "+-":
            op = self.take().text
            rhs, _ = self.term()
            value = value + rhs if op == "+" else value - rhs
            multi = True
        return value, (None if multi else factors)

    def term(self):
        value = self.factor()
        factors = [value]
        while self.peek().kind == "op" and self.peek().text in "*/":
            op = self.take()
            if op.text == "*":
                f = self.factor()
                value = value * f
                factors.append(f)
            else:
                t = self.peek()
                if t.kind != "num" or "." in t.text:
                    self.error("division is only allowed by an integer literal", t)
                self.take()
                d = int(t.text)
                if d == 0:
                    self.error("division by zero", t)
                value = value.scale(mpq(1, d))
                factors.append(MultiPoly.constant(self.ring, mpq(1, d)))
        return value, factors

    def factor(self):
        base = self.base()
        if self.peek().kind == "op" and self.peek().text == "^":
            self.take()
            t = self.peek()
            if t.kind == "op" and t.text == "-":
                self.error("negative exponent", t)
            if t.kind != "num" or "." in t.text:
                self.error("exponent must be a non-negative integer literal", t)
            self.take()
            base = base ** int(t.text)
        return base

    def base(self):
        t = self.peek()
        if t.kind == "num":
            self.take()
            return MultiPoly.constant(self.ring, _number(t.text))
        if t.kind == "name":
            self.take()
            if t.text not in self.ring:
                self.error(f"unknown variable {t.text!r}", t)
            return MultiPoly.variable(self.ring, t.text)
        if t.kind == "op" and t.text == "(":
            self.take()
            v, _ = self.expr()
            self.expect(")")
            return v
        if t.kind == "op" and t.text == "-":
            self.take()
            return -self.factor()
        self.error(f"unexpected {t.text or 'end of input'!r}")


def parse_polynomial(text: str, variables=("x", "y", "z"), *, line: int = 1, column: int = 1) -> MultiPoly:
    """Parse ``text`` into a fully expanded polynomial over ``variables``."""
    return _Parser(text, tuple(variables), line, column).parse()[0]


def parse_with_factors(text: str, variables=("x", "y", "z"), *, line: int = 1,
                       column: int = 1) -> tuple:
    """Polynomial plus its top-level product factors (non-constant ones).

    A sum at top level yields the polynomial itself as its only factor.
    """
    ring = tuple(variables)
    value, factors = _Parser(text, ring, line, column).parse()
    if factors is None:
        return value, [value]
    parts = [f for f in factors if not f.is_constant()]
    return value, parts or [value]
