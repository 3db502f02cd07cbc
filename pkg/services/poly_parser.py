# services/poly_parser.py
"""Recursive-descent parser for polynomial strings such as "1 - 1.4*x1^2 + x2".

Grammar:
    expr   := term (('+' | '-') term)*
    term   := unary ('*' unary)*
    unary  := ('+' | '-') unary | power
    power  := atom ('^' INT)?
    atom   := NUMBER | VAR | '(' expr ')'
Variables are x1..xn; implicit multiplication is not accepted.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from models.polynomial import Polynomial

_TOKEN = re.compile(r"\s*(?:(\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)|(x\d+)|(\*\*|[-+*^()]))")


class PolynomialSyntaxError(ValueError):
    def __init__(self, message: str, column: int, text: str = ""):
        super().__init__(f"{message} at column {column}" + (f" in {text!r}" if text else ""))
        self.column = column


@dataclass
class _Token:
    kind: str
    value: str
    column: int


def _tokenize(text: str) -> list[_Token]:
    out: list[_Token] = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise PolynomialSyntaxError(f"unexpected character {text[col - 1]!r}", col, text)
        num, var, op = m.groups()
        start = m.start(m.lastindex) + 1
        if num is not None:
            out.append(_Token("num", num, start))
        elif var is not None:
            out.append(_Token("var", var, start))
        else:
            out.append(_Token("op", "^" if op == "**" else op, start))
        pos = m.end()
    out.append(_Token("end", "", len(text) + 1))
    return out


class _Parser:
    def __init__(self, text: str, n: int):
        self.text = text
        self.n = n
        self.tokens = _tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> _Token:
        return self.tokens[self.pos]

    def _fail(self, message: str) -> PolynomialSyntaxError:
        return PolynomialSyntaxError(message, self.tok.column, self.text)

    def _accept(self, op: str) -> bool:
        if self.tok.kind == "op" and self.tok.value == op:
            self.pos += 1
            return True
        return False

    def parse(self) -> Polynomial:
        if self.tok.kind == "end":
            raise self._fail("empty polynomial")
        p = self.expr()
        if self.tok.kind != "end":
            raise self._fail(f"unexpected {self.tok.value!r}")
        return p

    def expr(self) -> Polynomial:
        p = self.term()
        while True:
            if self._accept("+"):
                p = p + self.term()
            elif self._accept("-"):
                p = p - self.term()
            else:
                return p

    def term(self) -> Polynomial:
        p = self.unary()
        while self._accept("*"):
            p = p * self.unary()
        return p

    def unary(self) -> Polynomial:
        if self._accept("-"):
            return -self.unary()
        if self._accept("+"):
            return self.unary()
        return self.power()

    def power(self) -> Polynomial:
        base = self.atom()
        if self._accept("^"):
            tok = self.tok
            if tok.kind != "num" or not tok.value.isdigit():
                raise self._fail("exponent must be a nonnegative integer")
            self.pos += 1
            return base ** int(tok.value)
        return base

    def atom(self) -> Polynomial:
        tok = self.tok
        if tok.kind == "num":
            self.pos += 1
            return Polynomial.constant(self.n, float(tok.value))
        if tok.kind == "var":
            idx = int(tok.value[1:])
            if not 1 <= idx <= self.n:
                raise self._fail(f"variable {tok.value} outside x1..x{self.n}")
            self.pos += 1
            return Polynomial.variable(self.n, idx - 1)
        if self._accept("("):
            p = self.expr()
            if not self._accept(")"):
                raise self._fail("expected ')'")
            return p
        if tok.kind == "end":
            raise self._fail("unexpected end of input")
        raise self._fail(f"unexpected {tok.value!r}")


def parse_polynomial(text: str, n: int) -> Polynomial:
    if n < 1:
        raise ValueError(f"dimension must be positive, got {n}")
    return _Parser(text, n).parse()
