"""Recursive-descent parser for the ASCII formula grammar.

::

    formula  := disj
    disj     := conj ('|' conj)*
    conj     := unary ('&' unary)*
    unary    := '!' unary | ('E' | 'A') IDENT unary | '(' formula ')'
              | 'true' | 'false' | atom
    atom     := IDENT '(' terms ')' | '{' rows '}' '(' terms ')'
              | term REL term
    REL      := '<' | '=' | '>' | '<=' | '>=' | '!='
    term     := summand (('+' | '-') summand)*          (ORDERED_QVS)
              | IDENT | NUMBER                           (other theories)
    summand  := '-' summand | NUMBER ['*'] [IDENT] | IDENT
    rows     := [row (',' row)*]
    row      := '(' elem (',' elem)* ')'
    NUMBER   := digits ['/' digits]

``>``, ``<=``, ``>=`` and ``!=`` are sugar and desugar to ``<``, ``=``, ``!``.
Identifiers naming a signature constant denote that constant; all other
identifiers are variables.
"""

from __future__ import annotations

import re
from fractions import Fraction

from ..errors import FormulaSyntaxError, SortError
from .signature import FINITE, ORDERED_QVS, PURE_SET, Signature
from .syntax import (BOT, TOP, And, Const, Eq, Exists, Forall, Lt, Not, Or, Rel, Tab,
                     Var, lin, linear_parts)

_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<id>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<op><=|>=|!=|[()&|!<=>+\-*{},]))"
)
_KEYWORDS = {"E", "A", "true", "false"}


def _tokenize(text: str):
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise FormulaSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    return out


class _Parser:
    def __init__(self, text: str, sig: Signature):
        self.text = text
        self.sig = sig
        self.toks = _tokenize(text)
        self.i = 0

    # token helpers
    def peek(self, k=0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def error(self, msg):
        tok = self.peek()
        if tok is None:
            off = self.toks[-1][2] if self.toks else 0
            raise FormulaSyntaxError(f"{msg}, found end of input", off)
        raise FormulaSyntaxError(f"{msg}, found {tok[1]!r}", tok[2])

    def take(self, value=None, kind=None):
        tok = self.peek()
        if tok is None or (value is not None and tok[1] != value) or (kind and tok[0] != kind):
            self.error(f"expected {value or kind}")
        self.i += 1
        return tok

    def at(self, value):
        tok = self.peek()
        return tok is not None and tok[1] == value and tok[0] == "op"

    # grammar
    def parse(self):
        if not self.toks:
            raise FormulaSyntaxError("empty formula", 0)
        phi = self.disj()
        if self.peek() is not None:
            self.error("expected end of input")
        return phi

    def disj(self):
        args = [self.conj()]
        while self.at("|"):
            self.i += 1
            args.append(self.conj())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conj(self):
        args = [self.unary()]
        while self.at("&"):
            self.i += 1
            args.append(self.unary())
        return args[0] if len(args) == 1 else And(tuple(args))

    def unary(self):
        tok = self.peek()
        if tok is None:
            self.error("expected formula")
        kind, val, _ = tok
        if kind == "op" and val == "!":
            self.i += 1
            return Not(self.unary())
        if kind == "op" and val == "(":
            self.i += 1
            phi = self.disj()
            self.take(")")
            return phi
        if kind == "id" and val in ("E", "A"):
            self.i += 1
            name = self.take(kind="id")[1]
            if name in _KEYWORDS:
                self.error("expected variable")
            if self.sig.is_constant(name):
                raise SortError(f"cannot quantify over constant {name!r}")
            body = self.unary()
            return Exists(name, body) if val == "E" else Forall(name, body)
        if kind == "id" and val == "true":
            self.i += 1
            return TOP
        if kind == "id" and val == "false":
            self.i += 1
            return BOT
        return self.atom()

    def atom(self):
        tok = self.peek()
        nxt = self.peek(1)
        if tok[0] == "op" and tok[1] == "{":
            return self.table()
        if tok[0] == "id" and nxt is not None and nxt[1] == "(":
            name = tok[1]
            arity = self.sig.relation_arity(name)
            if arity is None:
                raise SortError(f"unknown relation symbol {name!r}")
            self.i += 2
            args = self.terms()
            self.take(")")
            if len(args) != arity:
                raise SortError(f"{name} expects {arity} arguments, got {len(args)}")
            return Rel(name, tuple(args))
        left = self.term()
        tok = self.peek()
        if tok is None or tok[1] not in ("<", "=", ">", "<=", ">=", "!="):
            self.error("expected relation")
        op = tok[1]
        self.i += 1
        right = self.term()
        if op in ("<", ">", "<=", ">=") and self.sig.theory != ORDERED_QVS:
            raise SortError(f"'<' is not in the {self.sig.theory} signature")
        if op == "<":
            return Lt(left, right)
        if op == ">":
            return Lt(right, left)
        if op == "=":
            return Eq(left, right)
        if op == "!=":
            return Not(Eq(left, right))
        if op == "<=":
            return Or((Lt(left, right), Eq(left, right)))
        return Or((Lt(right, left), Eq(left, right)))

    def terms(self):
        args = [self.term()]
        while self.at(","):
            self.i += 1
            args.append(self.term())
        return args

    def table(self):
        if self.sig.theory != FINITE:
            raise SortError("relation literals are only available for FINITE signatures")
        self.take("{")
        rows = []
        width = None
        if not self.at("}"):
            while True:
                self.take("(")
                row = [self.element()]
                while self.at(","):
                    self.i += 1
                    row.append(self.element())
                self.take(")")
                if width is not None and len(row) != width:
                    self.error("ragged relation literal")
                width = len(row)
                rows.append(tuple(row))
                if not self.at(","):
                    break
                self.i += 1
        self.take("}")
        self.take("(")
        args = self.terms()
        self.take(")")
        if width is not None and width != len(args):
            raise SortError("relation literal width does not match its arguments")
        return Tab(frozenset(rows), tuple(args))

    def element(self):
        neg = False
        if self.at("-"):
            self.i += 1
            neg = True
        tok = self.take()
        if tok[0] == "num" and "/" not in tok[1]:
            v = int(tok[1])
            return -v if neg else v
        if tok[0] == "id" and not neg and self.sig.is_constant(tok[1]):
            return self.sig.const_map[tok[1]]
        raise SortError(f"{tok[1]!r} is not an element name")

    # terms
    def term(self):
        if self.sig.theory == ORDERED_QVS:
            coeffs, const = self.summand()
            while self.at("+") or self.at("-"):
                sign = 1 if self.take()[1] == "+" else -1
                c2, k2 = self.summand()
                for v, c in c2.items():
                    coeffs[v] = coeffs.get(v, 0) + sign * c
                const += sign * k2
            return lin(coeffs, const)
        tok = self.peek()
        if tok is None:
            self.error("expected term")
        if tok[0] == "op" and tok[1] == "-" and self.sig.theory == FINITE:
            self.i += 1
            num = self.take(kind="num")
            if "/" in num[1]:
                raise SortError("rational literals need ORDERED_QVS")
            return Const(-int(num[1]))
        if tok[0] == "num":
            if self.sig.theory == PURE_SET or "/" in tok[1]:
                raise SortError(f"numeric literal {tok[1]!r} not in the {self.sig.theory} signature")
            self.i += 1
            t = Const(int(tok[1]))
        elif tok[0] == "id" and tok[1] not in _KEYWORDS:
            self.i += 1
            t = self.ident(tok[1])
        else:
            self.error("expected term")
        nxt = self.peek()
        if nxt is not None and nxt[1] in ("+", "-", "*"):
            raise SortError(f"'{nxt[1]}' is not in the {self.sig.theory} signature")
        return t

    def ident(self, name):
        if self.sig.is_constant(name):
            return Const(self.sig.const_map[name])
        return Var(name)

    def summand(self):
        tok = self.peek()
        if tok is None:
            self.error("expected term")
        kind, val, _ = tok
        if kind == "op" and val == "-":
            self.i += 1
            c, k = self.summand()
            return {v: -x for v, x in c.items()}, -k
        if kind == "num":
            self.i += 1
            q = Fraction(val)
            star = False
            if self.at("*"):
                self.i += 1
                star = True
            nt = self.peek()
            if nt is not None and nt[0] == "id" and nt[1] not in _KEYWORDS:
                self.i += 1
                c, k = linear_parts(self.ident(nt[1]))
                return {v: q * x for v, x in c.items()}, q * k
            if star:
                self.error("expected variable after '*'")
            return {}, q
        if kind == "id" and val not in _KEYWORDS:
            self.i += 1
            c, k = linear_parts(self.ident(val))
            return dict(c), k
        self.error("expected term")


def parse(text: str, sig: Signature):
    """Parse ``text`` into a formula over ``sig``."""
    return _Parser(text, sig).parse()
