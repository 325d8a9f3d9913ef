"""Tiny arithmetic-expression language for custom radial profiles.

Grammar (``^`` binds tighter than unary minus, and is right-associative)::

    expr    := term (("+" | "-") term)*
    term    := unary (("*" | "/") unary)*
    unary   := "-" unary | "+" unary | power
    power   := atom ("^" unary)?
    atom    := NUMBER | "r" | FUNC "(" expr ")" | "(" expr ")"
    FUNC    := "exp" | "sin"

Expressions compile to numpy closures; derivatives come from finite
differences.
"""

from __future__ import annotations

import math
import operator
import re

import numpy as np

from shocklab.errors import ParseError
from shocklab.profiles import Profile1D

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)
_FUNCS = {"exp": np.exp, "sin": np.sin}
_BINOPS = {"+": operator.add, "-": operator.sub, "*": operator.mul, "/": operator.truediv}


def _binary(op, a, b):
    return lambda r: op(a(r), b(r))


def _tokenize(text: str, line: int):
    pos = 0
    out = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            col = pos + 1 + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[col - 1]!r}", line, col)
        kind = m.lastgroup
        col = m.start(kind) + 1
        out.append((kind, m.group(kind), col))
        pos = m.end()
    out.append(("end", "", len(text) + 1))
    return out


class _Parser:
    def __init__(self, text: str, line: int) -> None:
        self.toks = _tokenize(text, line)
        self.i = 0
        self.line = line

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, msg, tok):
        raise ParseError(msg, self.line, tok[2])

    def expect(self, op):
        tok = self.take()
        if tok[0] != "op" or tok[1] != op:
            self.error(f"expected {op!r}", tok)

    def parse(self):
        node = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            self.error(f"unexpected token {tok[1]!r}", tok)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.term()
            node = _binary(_BINOPS[op], node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            rhs = self.unary()
            node = _binary(_BINOPS[op], node, rhs)
        return node

    def unary(self):
        tok = self.peek()
        if tok[0] == "op" and tok[1] in "+-":
            self.take()
            inner = self.unary()
            if tok[1] == "+":
                return inner
            return lambda r: -inner(r)
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            exponent = self.unary()
            return _binary(operator.pow, base, exponent)
        return base

    def atom(self):
        tok = self.take()
        kind, text, _ = tok
        if kind == "num":
            value = float(text)
            return lambda r: np.full_like(r, value)
        if kind == "name":
            if text == "r":
                return lambda r: r
            if text in _FUNCS:
                fn = _FUNCS[text]
                self.expect("(")
                inner = self.expr()
                self.expect(")")
                return lambda r: fn(inner(r))
            self.error(f"unknown name {text!r}", tok)
        if kind == "op" and text == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        self.error("expected a number, 'r', a function or '('", tok)


def compile_expression(text: str, line: int = 1):
    """Compile ``text`` to a vectorised evaluator of ``r``."""
    node = _Parser(text, line).parse()

    def f(r):
        r = np.asarray(r, dtype=float)
        with np.errstate(all="ignore"):
            return np.asarray(node(r), dtype=float) + np.zeros_like(r)

    return f


def compile_profile(
    text: str, line: int = 1, support_radius: float = math.inf
) -> Profile1D:
    return Profile1D(
        value=compile_expression(text, line),
        support_radius=support_radius,
        extent=1.0,
        name="expr",
        params=(text,),
    )
