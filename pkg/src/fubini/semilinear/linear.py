"""Normalized linear atoms and NNF conversion for ordered Q-vector spaces.

An atom ``(rel, coeffs, const)`` reads ``sum(c*v) + const rel 0`` with
``rel`` in ``{"<", "="}``; ``coeffs`` is a sorted tuple of ``(var, c)`` with
``c != 0``.  Equalities are scaled to leading coefficient 1, strict
inequalities to leading coefficient +-1.

NNF nodes are plain tuples: ``("and", items)``, ``("or", items)``,
``("atom", atom)`` or the booleans ``True``/``False``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from ..logic.syntax import (BOT, TOP, And, Bot, Eq, Exists, Forall, Lt, Not, Or,
                            Rel, Top, Var, conj, disj, lin, linear_parts, position)


class Key(tuple):
    """A tuple that remembers its hash; atoms and nodes are hashed often."""

    def __hash__(self):
        try:
            return self.__dict__["h"]
        except KeyError:
            h = self.__dict__["h"] = tuple.__hash__(self)
            return h


def var_key(name: str):
    i = position(name)
    return (0, i, "") if i is not None else (1, 0, name)


def make_atom(rel: str, coeffs: dict, const):
    """Normalized atom, or a bool when the atom is constant."""
    items = sorted(((v, Fraction(c)) for v, c in coeffs.items() if c != 0), key=lambda t: var_key(t[0]))
    const = Fraction(const)
    if not items:
        return (const < 0) if rel == "<" else (const == 0)
    lead = items[0][1]
    s = lead if rel == "=" else abs(lead)
    if s != 1:
        items = [(v, c / s) for v, c in items]
        const = const / s
    return Key((rel, Key(items), const))


def atom_from_terms(rel: str, left, right):
    lc, lk = linear_parts(left)
    rc, rk = linear_parts(right)
    coeffs = dict(lc)
    for v, c in rc.items():
        coeffs[v] = coeffs.get(v, 0) - c
    return make_atom(rel, coeffs, lk - rk)


@lru_cache(maxsize=1 << 16)
def negate_atom(a) -> tuple:
    """NNF of the negation of an atom, using only ``<`` and ``=``."""
    rel, coeffs, const = a
    d = dict(coeffs)
    flipped = ("atom", make_atom("<", {v: -c for v, c in coeffs}, -const))
    if rel == "<":
        return Key(("or", Key((flipped, ("atom", make_atom("=", d, const))))))
    return Key(("or", Key((("atom", make_atom("<", d, const)), flipped))))


def mk_and(items):
    out = []
    seen = set()
    for it in items:
        if it is False:
            return False
        if it is True:
            continue
        if it[0] == "and":
            sub = it[1]
        else:
            sub = (it,)
        for s in sub:
            if s not in seen:
                seen.add(s)
                out.append(s)
    if not out:
        return True
    if len(out) == 1:
        return out[0]
    return Key(("and", Key(out)))


def mk_or(items):
    out = []
    seen = set()
    for it in items:
        if it is True:
            return True
        if it is False:
            continue
        if it[0] == "or":
            sub = it[1]
        else:
            sub = (it,)
        for s in sub:
            if s not in seen:
                seen.add(s)
                out.append(s)
    if not out:
        return False
    if len(out) == 1:
        return out[0]
    return Key(("or", Key(out)))


def to_nnf(phi, positive: bool = True, base=None):
    """Quantifier-free formula to NNF over normalized atoms.

    ``base`` is a callable mapping a term to the NNF of ``C(term)``.
    """
    if isinstance(phi, Top):
        return positive
    if isinstance(phi, Bot):
        return not positive
    if isinstance(phi, (Eq, Lt)):
        a = atom_from_terms("=" if isinstance(phi, Eq) else "<", phi.left, phi.right)
        if a is True or a is False:
            return a if positive else (not a)
        return ("atom", a) if positive else negate_atom(a)
    if isinstance(phi, Rel):
        if base is None:
            raise ValueError(f"relation {phi.name} not interpretable here")
        inner = base(phi.args[0])
        return inner if positive else nnf_not(inner)
    if isinstance(phi, Not):
        return to_nnf(phi.arg, not positive, base)
    if isinstance(phi, And):
        parts = [to_nnf(a, positive, base) for a in phi.args]
        return mk_and(parts) if positive else mk_or(parts)
    if isinstance(phi, Or):
        parts = [to_nnf(a, positive, base) for a in phi.args]
        return mk_or(parts) if positive else mk_and(parts)
    if isinstance(phi, (Exists, Forall)):
        raise ValueError("to_nnf expects a quantifier-free formula")
    raise TypeError(f"unsupported node {phi!r}")


def nnf_not(node):
    if node is True or node is False:
        return not node
    tag = node[0]
    if tag == "atom":
        return negate_atom(node[1])
    parts = [nnf_not(n) for n in node[1]]
    return mk_or(parts) if tag == "and" else mk_and(parts)


def nnf_vars(node) -> set:
    out = set()
    stack = [node]
    while stack:
        n = stack.pop()
        if n is True or n is False:
            continue
        if n[0] == "atom":
            out.update(v for v, _ in n[1][1])
        else:
            stack.extend(n[1])
    return out


# ------------------------------------------------------------ back to AST


def atom_to_formula(a):
    """Render ``sum + k rel 0`` as ``v rel t`` solved for the last variable."""
    rel, coeffs, const = a
    v, c = coeffs[-1]
    rest = {w: -d / c for w, d in coeffs[:-1]}
    rhs = lin(rest, -const / c)
    if rel == "=":
        return Eq(Var(v), rhs)
    if c > 0:
        return Lt(Var(v), rhs)
    return Lt(rhs, Var(v))


def from_nnf(node):
    if node is True:
        return TOP
    if node is False:
        return BOT
    tag = node[0]
    if tag == "atom":
        return atom_to_formula(node[1])
    parts = [from_nnf(n) for n in node[1]]
    return conj(*parts) if tag == "and" else disj(*parts)


# --------------------------------------------------------------- evaluation


def eval_atom(a, env) -> bool:
    rel, coeffs, const = a
    s = const
    for v, c in coeffs:
        s += c * env[v]
    return s < 0 if rel == "<" else s == 0


def eval_nnf(node, env) -> bool:
    if node is True or node is False:
        return node
    tag = node[0]
    if tag == "atom":
        return eval_atom(node[1], env)
    if tag == "and":
        return all(eval_nnf(n, env) for n in node[1])
    return any(eval_nnf(n, env) for n in node[1])


def substitute_atom(a, v: str, coeffs_t: dict, const_t):
    """Replace variable ``v`` by the linear form ``coeffs_t + const_t``."""
    rel, coeffs, const = a
    cv = None
    out = {}
    for w, c in coeffs:
        if w == v:
            cv = c
        else:
            out[w] = c
    if cv is None:
        return a
    for w, d in coeffs_t.items():
        out[w] = out.get(w, 0) + cv * d
    return make_atom(rel, out, const + cv * const_t)


def coeff_of(a, v: str):
    for w, c in a[1]:
        if w == v:
            return c
    return 0
