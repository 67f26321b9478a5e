"""Pretty printer; output reparses to an equal AST."""

from __future__ import annotations

from fractions import Fraction

from .syntax import (And, Bot, Const, Eq, Exists, Forall, Lt, Not, Or, Rel, Tab,
                     Top, Var)


def _num(c) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return f"{c.numerator}/{c.denominator}"


def _elem(e) -> str:
    if isinstance(e, Fraction):
        return _num(e)
    return str(e)


def pretty_term(t) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Const):
        return _elem(t.value)
    parts = []
    for i, (v, c) in enumerate(t.coeffs):
        if i == 0:
            if c == 1:
                parts.append(v)
            elif c == -1:
                parts.append(f"-{v}")
            else:
                parts.append(f"{_num(c)}*{v}")
        else:
            sign = " + " if c > 0 else " - "
            a = abs(c)
            parts.append(sign + (v if a == 1 else f"{_num(a)}*{v}"))
    if t.const != 0:
        parts.append((" + " if t.const > 0 else " - ") + _num(abs(t.const)))
    return "".join(parts)


def _row_key(row):
    return tuple((type(e).__name__, e) if not isinstance(e, (int, Fraction)) else ("", e) for e in row)


def pretty(phi) -> str:
    if isinstance(phi, Top):
        return "true"
    if isinstance(phi, Bot):
        return "false"
    if isinstance(phi, Eq):
        return f"{pretty_term(phi.left)} = {pretty_term(phi.right)}"
    if isinstance(phi, Lt):
        return f"{pretty_term(phi.left)} < {pretty_term(phi.right)}"
    if isinstance(phi, Rel):
        return f"{phi.name}({', '.join(pretty_term(t) for t in phi.args)})"
    if isinstance(phi, Tab):
        rows = sorted(phi.rows, key=_row_key)
        body = ", ".join("(" + ", ".join(_elem(e) for e in r) + ")" for r in rows)
        return "{" + body + "}(" + ", ".join(pretty_term(t) for t in phi.args) + ")"
    if isinstance(phi, Not):
        inner = phi.arg
        if isinstance(inner, (Rel, Tab, Top, Bot, Not)):
            return "!" + pretty(inner)
        return f"!({pretty(inner)})"
    if isinstance(phi, And):
        return " & ".join(f"({pretty(a)})" if isinstance(a, (And, Or)) else pretty(a)
                          for a in phi.args)
    if isinstance(phi, Or):
        return " | ".join(f"({pretty(a)})" if isinstance(a, Or) else pretty(a)
                          for a in phi.args)
    if isinstance(phi, Exists):
        return f"E {phi.var} ({pretty(phi.body)})"
    if isinstance(phi, Forall):
        return f"A {phi.var} ({pretty(phi.body)})"
    raise TypeError(f"not a formula: {type(phi).__name__}")
