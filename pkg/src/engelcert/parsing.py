"""Tokenizer and recursive-descent parser for the expression grammar.

The parser only builds a small tuple-based syntax tree; each consumer
(scalar coefficients, coordinate charts) evaluates the tree into its own
value type.  Node shapes::

    ("num", int)            ("sym", name)
    ("add", [nodes])        ("neg", node)
    ("mul", left, right)    ("div", left, right)
    ("pow", base, exponent) ("call", name, [nodes])
"""
from __future__ import annotations

import re

__all__ = ["ParseError", "parse", "walk_symbols"]

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^(),]))")


class ParseError(ValueError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.text = text
        self.pos = pos


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError("unexpected character", text, pos)
        num, ident, op = m.groups()
        start = m.start(m.lastindex)
        if num is not None:
            tokens.append(("num", int(num), start))
        elif ident is not None:
            tokens.append(("ident", ident, start))
        else:
            tokens.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, op):
        tok = self.take()
        if tok[0] != "op" or tok[1] != op:
            raise ParseError(f"expected {op!r}", self.text, tok[2])
        return tok

    def is_op(self, *ops):
        tok = self.peek()
        return tok[0] == "op" and tok[1] in ops

    def expr(self):
        terms = [self.term()]
        while self.is_op("+", "-"):
            op = self.take()[1]
            t = self.term()
            terms.append(t if op == "+" else ("neg", t))
        return terms[0] if len(terms) == 1 else ("add", terms)

    def term(self):
        node = self.unary()
        while self.is_op("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            node = ("mul" if op == "*" else "div", node, rhs)
        return node

    def unary(self):
        if self.is_op("-"):
            self.take()
            return ("neg", self.unary())
        if self.is_op("+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.is_op("^"):
            self.take()
            return ("pow", base, self.unary())
        return base

    def atom(self):
        tok = self.take()
        kind, value, pos = tok
        if kind == "num":
            return ("num", value)
        if kind == "ident":
            if self.is_op("("):
                self.take()
                args = [self.expr()]
                while self.is_op(","):
                    self.take()
                    args.append(self.expr())
                self.expect(")")
                return ("call", value, args)
            return ("sym", value)
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect(")")
            return node
        if kind == "end":
            raise ParseError("unexpected end of input", self.text, pos)
        raise ParseError(f"unexpected token {value!r}", self.text, pos)


def parse(text: str):
    """Parse ``text`` into a syntax tree; raises :class:`ParseError`."""
    p = _Parser(text)
    node = p.expr()
    tok = p.peek()
    if tok[0] != "end":
        raise ParseError(f"trailing input {tok[1]!r}", text, tok[2])
    return node


def walk_symbols(node):
    """Yield every bare identifier appearing in a tree."""
    tag = node[0]
    if tag == "sym":
        yield node[1]
    elif tag == "add":
        for n in node[1]:
            yield from walk_symbols(n)
    elif tag == "neg":
        yield from walk_symbols(node[1])
    elif tag in ("mul", "div", "pow"):
        yield from walk_symbols(node[1])
        yield from walk_symbols(node[2])
    elif tag == "call":
        for n in node[2]:
            yield from walk_symbols(n)
