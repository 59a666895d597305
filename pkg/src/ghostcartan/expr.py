"""Plain-text grammar for graded polynomials.

Tokens: ``phi[a]``, ``lam[a]``, ``c[a]``, ``cb[a]`` (1-based), integers, ``i``,
and ``+ - * / ^ ( )``.  Division is only allowed by nonzero constants and
``^`` only takes non-negative integer exponents.
"""
from __future__ import annotations

import re
from typing import List, Tuple

from .algebra import GradedPolynomial, ScalarC, format_scalar

__all__ = ["ParseError", "NonPolynomialError", "parse", "format_poly"]


class ParseError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"{message}{where}")


class NonPolynomialError(ParseError):
    """The input is well-formed text but not a polynomial (function call, bad power, ...)."""


_TOKEN = re.compile(
    r"\s*(?:(?P<var>phi|lam|cb|c)\s*\[\s*(?P<idx>\d+)\s*\]"
    r"|(?P<num>\d+(?:\.\d*)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str) -> List[Tuple[str, object, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start() + (len(m.group(0)) - len(m.group(0).lstrip()))
        if m.group("var"):
            tokens.append(("var", (m.group("var"), int(m.group("idx"))), start))
        elif m.group("num"):
            if "." in m.group("num"):
                raise NonPolynomialError("decimal literals are not exact; use p/q", start)
            tokens.append(("num", int(m.group("num")), start))
        elif m.group("name"):
            name = m.group("name")
            if name == "i":
                tokens.append(("i", None, start))
            else:
                tokens.append(("name", name, start))
        else:
            tokens.append(("op", m.group("op"), start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, n: int):
        self.n = n
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, value, pos = self.take()
        if kind != "op" or value != op:
            raise ParseError(f"expected {op!r}", pos)

    def parse(self) -> GradedPolynomial:
        result = self.expr()
        kind, _, pos = self.peek()
        if kind != "end":
            raise ParseError("unexpected trailing input", pos)
        return result

    def expr(self):
        left = self.term()
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value in "+-":
                self.take()
                right = self.term()
                left = left + right if value == "+" else left - right
            else:
                return left

    def term(self):
        left = self.unary()
        while True:
            kind, value, pos = self.peek()
            if kind == "op" and value == "*":
                self.take()
                left = left * self.unary()
            elif kind == "op" and value == "/":
                self.take()
                divisor = self.unary()
                const = divisor.constant_value()
                if const is None:
                    raise NonPolynomialError("division by a non-constant expression", pos)
                if not const:
                    raise ParseError("division by zero", pos)
                left = left / const
            else:
                return left

    def unary(self):
        kind, value, _ = self.peek()
        if kind == "op" and value in "+-":
            self.take()
            operand = self.unary()
            return -operand if value == "-" else operand
        return self.power()

    def power(self):
        base = self.atom()
        kind, value, pos = self.peek()
        if kind == "op" and value == "^":
            self.take()
            kind, value, pos = self.peek()
            if kind == "op" and value in "(-":
                expo = self.power() if value == "(" else -self.power_operand()
                k = expo.constant_value()
                if k is None or k.im or k.re.denominator != 1 or k.re < 0:
                    raise NonPolynomialError("exponent must be a non-negative integer", pos)
                return base ** int(k.re)
            self.take()
            if kind != "num":
                raise NonPolynomialError("exponent must be a non-negative integer", pos)
            return base ** value
        return base

    def power_operand(self):
        self.take()
        return self.power()

    def atom(self):
        kind, value, pos = self.take()
        if kind == "num":
            return GradedPolynomial.const(self.n, value)
        if kind == "i":
            return GradedPolynomial.const(self.n, ScalarC(0, 1))
        if kind == "var":
            name, idx = value
            if not 1 <= idx <= 2 * self.n:
                raise ParseError(f"index {idx} out of range 1..{2 * self.n}", pos)
            return GradedPolynomial.var(self.n, name, idx)
        if kind == "op" and value == "(":
            inner = self.expr()
            self.expect_op(")")
            return inner
        if kind == "name":
            nxt = self.peek()
            if nxt[0] == "op" and nxt[1] == "(":
                raise NonPolynomialError(f"function {value!r} is not polynomial", pos)
            raise ParseError(f"unknown identifier {value!r}", pos)
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected token {value!r}", pos)


def parse(text: str, n: int) -> GradedPolynomial:
    """Parse ``text`` into a polynomial on ``n`` degrees of freedom."""
    return _Parser(text, n).parse()


def _format_monomial(key, n: int) -> str:
    exps, mask = key
    N = 2 * n
    parts = []
    for pos, e in enumerate(exps):
        if e:
            name = f"phi[{pos + 1}]" if pos < N else f"lam[{pos - N + 1}]"
            parts.append(name if e == 1 else f"{name}^{e}")
    for bit in range(2 * N):
        if mask >> bit & 1:
            parts.append(f"c[{bit + 1}]" if bit < N else f"cb[{bit - N + 1}]")
    return "*".join(parts)


def format_poly(p: GradedPolynomial) -> str:
    """Canonical, re-parseable text for ``p``; ``0`` for the zero polynomial."""
    pieces = []
    for key, coeff in p.items():
        mono = _format_monomial(key, p.n)
        negative = not coeff.im and coeff.re < 0 or not coeff.re and coeff.im < 0
        mag = -coeff if negative else coeff
        if not mono:
            body = format_scalar(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{format_scalar(mag)}*{mono}"
        pieces.append((negative, body))
    if not pieces:
        return "0"
    out = ("-" if pieces[0][0] else "") + pieces[0][1]
    for negative, body in pieces[1:]:
        out += (" - " if negative else " + ") + body
    return out

