"""Relation DSL: ``lhs ~ rhs`` over + - * / ^, sin/cos/tan/abs and table symbols."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from ..errors import ZetaLadderError
from . import expr as E
from .symbols import DEFAULT_TABLE, FUNCTIONS


class ParseError(ZetaLadderError, ValueError):
    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class RelationSyntaxError(ParseError):
    pass


class UnknownSymbolError(ParseError):
    def __init__(self, name, offset):
        super().__init__(f"unknown symbol {name!r}", offset)
        self.name = name


_TOKEN = re.compile(r"\s*(?:(\d+(?:\.\d*)?|\.\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()~]))")


@dataclass(frozen=True)
class Tok:
    kind: str   # num, name, op, end
    text: str
    pos: int


def tokenize(text):
    out = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            out.append(Tok("end", "", pos))
            return out
        m = _TOKEN.match(text, pos)
        if not m:
            raise RelationSyntaxError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastindex)
        if m.group(1):
            out.append(Tok("num", m.group(1), start))
        elif m.group(2):
            out.append(Tok("name", m.group(2), start))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            out.append(Tok("op", op, start))
        pos = m.end()


# raw syntax tree: tuples (kind, pos, ...)

class _Parser:
    def __init__(self, text):
        self.toks = tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, op):
        t = self.tok
        if t.kind != "op" or t.text != op:
            found = "end of input" if t.kind == "end" else repr(t.text)
            raise RelationSyntaxError(f"expected {op!r}, found {found}", t.pos)
        return self.take()

    def at(self, *ops):
        return self.tok.kind == "op" and self.tok.text in ops

    def relation(self):
        lhs = self.expr()
        self.expect("~")
        rhs = self.expr()
        self.end()
        return lhs, rhs

    def end(self):
        if self.tok.kind != "end":
            raise RelationSyntaxError(f"unexpected {self.tok.text!r}", self.tok.pos)

    def expr(self):
        node = self.term()
        while self.at("+", "-"):
            op = self.take()
            node = ("bin", op.pos, op.text, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.at("*", "/"):
            op = self.take()
            node = ("bin", op.pos, op.text, node, self.unary())
        return node

    def unary(self):
        if self.at("-", "+"):
            op = self.take()
            inner = self.unary()
            return ("neg", op.pos, inner) if op.text == "-" else inner
        return self.power()

    def power(self):
        base = self.primary()
        if self.at("^"):
            op = self.take()
            return ("pow", op.pos, base, self.unary())
        return base

    def primary(self):
        t = self.tok
        if t.kind == "num":
            self.take()
            return ("num", t.pos, Fraction(t.text))
        if t.kind == "name":
            self.take()
            if self.at("("):
                self.take()
                arg = self.expr()
                self.expect(")")
                return ("call", t.pos, t.text, arg)
            return ("sym", t.pos, t.text)
        if self.at("("):
            self.take()
            inner = self.expr()
            self.expect(")")
            return inner
        found = "end of input" if t.kind == "end" else repr(t.text)
        raise RelationSyntaxError(f"unexpected {found}", t.pos)


def _exponent(node):
    """Raw exponent tree -> {Delta power: coefficient}."""
    kind, pos = node[0], node[1]
    if kind == "num":
        return {0: node[2]}
    if kind == "sym":
        if node[2] != "Delta":
            raise E.ExponentError(f"symbol {node[2]!r} in an exponent at offset {pos}")
        return {1: Fraction(1)}
    if kind == "neg":
        return {k: -v for k, v in _exponent(node[2]).items()}
    if kind == "bin":
        a, b = _exponent(node[3]), _exponent(node[4])
        op = node[2]
        if op in "+-":
            s = 1 if op == "+" else -1
            out = dict(a)
            for k, v in b.items():
                out[k] = out.get(k, 0) + s * v
            return {k: v for k, v in out.items() if v}
        if op == "/":
            if len(b) != 1:
                raise E.ExponentError(f"exponent divisor must be a monomial at offset {pos}")
            (kb, vb), = b.items()
            return {k - kb: v / vb for k, v in a.items()}
        return {ka + kb: va * vb for ka, va in a.items() for kb, vb in b.items()}
    raise E.ExponentError(f"unsupported exponent at offset {pos}")


def to_exponent(node):
    terms = {k: v for k, v in _exponent(node).items() if v}
    if not terms:
        return E.ZERO_EXP
    if len(terms) > 1 or next(iter(terms)) not in (-1, 0, 1):
        raise E.ExponentError(f"exponent at offset {node[1]} is not of the form q, q*Delta, q/Delta")
    (k, v), = terms.items()
    return E.Exponent(v, k)


def to_expr(node, table=DEFAULT_TABLE):
    kind, pos = node[0], node[1]
    if kind == "num":
        return E.const(node[2])
    if kind == "sym":
        name = node[2]
        if name not in table:
            raise UnknownSymbolError(name, pos)
        return E.atom(E.Sym(name))
    if kind == "call":
        name = node[2]
        if name not in FUNCTIONS:
            raise UnknownSymbolError(name, pos)
        return E.func(name, to_expr(node[3], table), table)
    if kind == "neg":
        return E.neg(to_expr(node[2], table))
    if kind == "pow":
        return E.power(to_expr(node[2], table), to_exponent(node[3]), table)
    a, b = to_expr(node[3], table), to_expr(node[4], table)
    op = node[2]
    if op == "+":
        return E.add(a, b, table=table)
    if op == "-":
        return E.sub(a, b, table)
    if op == "*":
        return E.mul(a, b)
    return E.div(a, b, table)


def parse_expr(text, table=DEFAULT_TABLE):
    p = _Parser(text)
    node = p.expr()
    p.end()
    return to_expr(node, table)


def parse_sides(text, table=DEFAULT_TABLE):
    lhs, rhs = _Parser(text).relation()
    return to_expr(lhs, table), to_expr(rhs, table)
