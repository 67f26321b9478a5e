"""First-order formula AST.

Terms are variables, constants and (for the ordered Q-vector-space theory)
canonical linear combinations.  Formulas are built from atoms, the
connectives ``& | !``, the quantifiers ``E``/``A`` and the truth constants.
Nodes are immutable and compare structurally.

Definable sets use positional variables ``x1 .. xm``; the helpers ``var``,
``apply`` and ``shift`` make the arity bookkeeping mechanical.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from fractions import Fraction
from typing import Any, Iterable, Mapping


class _Node:
    __slots__ = ()

    def _key(self):
        return tuple(getattr(self, f.name) for f in fields(self))

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other):
            return NotImplemented
        return hash(self) == hash(other) and self._key() == other._key()

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((type(self).__name__,) + self._key())
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        from .printer import pretty, pretty_term

        text = pretty_term(self) if isinstance(self, (Var, Const, Lin)) else pretty(self)
        return f"<{type(self).__name__} {text}>"


# ---------------------------------------------------------------- terms


@dataclass(frozen=True, eq=False, repr=False)
class Var(_Node):
    name: str


@dataclass(frozen=True, eq=False, repr=False)
class Const(_Node):
    value: Any


@dataclass(frozen=True, eq=False, repr=False)
class Lin(_Node):
    """``sum(c * v) + const`` with nonzero coefficients sorted by variable."""

    coeffs: tuple
    const: Fraction


Term = Var | Const | Lin


def lin(coeffs: Mapping[str, Any], const=0) -> Term:
    """Canonical linear term; collapses to ``Var``/``Const`` when possible."""
    items = tuple(sorted((v, Fraction(c)) for v, c in coeffs.items() if c != 0))
    const = Fraction(const)
    if not items:
        return Const(const)
    if len(items) == 1 and items[0][1] == 1 and const == 0:
        return Var(items[0][0])
    return Lin(items, const)


def linear_parts(t: Term) -> tuple[dict, Fraction]:
    """Coefficient map and constant of a term over the rationals."""
    if isinstance(t, Var):
        return {t.name: Fraction(1)}, Fraction(0)
    if isinstance(t, Const):
        return {}, Fraction(t.value)
    return dict(t.coeffs), t.const


def term_vars(t: Term) -> frozenset:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Lin):
        return frozenset(v for v, _ in t.coeffs)
    return frozenset()


# ------------------------------------------------------------- formulas


@dataclass(frozen=True, eq=False, repr=False)
class Top(_Node):
    pass


@dataclass(frozen=True, eq=False, repr=False)
class Bot(_Node):
    pass


TOP = Top()
BOT = Bot()


@dataclass(frozen=True, eq=False, repr=False)
class Eq(_Node):
    left: Term
    right: Term


@dataclass(frozen=True, eq=False, repr=False)
class Lt(_Node):
    left: Term
    right: Term


@dataclass(frozen=True, eq=False, repr=False)
class Rel(_Node):
    name: str
    args: tuple


@dataclass(frozen=True, eq=False, repr=False)
class Tab(_Node):
    """Explicit finite relation literal ``{(a,b),...}(t1,t2)``."""

    rows: frozenset
    args: tuple


@dataclass(frozen=True, eq=False, repr=False)
class Not(_Node):
    arg: Any


@dataclass(frozen=True, eq=False, repr=False)
class And(_Node):
    args: tuple


@dataclass(frozen=True, eq=False, repr=False)
class Or(_Node):
    args: tuple


@dataclass(frozen=True, eq=False, repr=False)
class Exists(_Node):
    var: str
    body: Any


@dataclass(frozen=True, eq=False, repr=False)
class Forall(_Node):
    var: str
    body: Any


ATOMS = (Eq, Lt, Rel, Tab)
Formula = Top | Bot | Eq | Lt | Rel | Tab | Not | And | Or | Exists | Forall


# ------------------------------------------------------ smart constructors


def conj(*args) -> Formula:
    out = []
    for a in args:
        if isinstance(a, Bot):
            return BOT
        if isinstance(a, Top):
            continue
        if isinstance(a, And):
            out.extend(a.args)
        else:
            out.append(a)
    out = list(dict.fromkeys(out))
    if not out:
        return TOP
    if len(out) == 1:
        return out[0]
    return And(tuple(out))


def disj(*args) -> Formula:
    out = []
    for a in args:
        if isinstance(a, Top):
            return TOP
        if isinstance(a, Bot):
            continue
        if isinstance(a, Or):
            out.extend(a.args)
        else:
            out.append(a)
    out = list(dict.fromkeys(out))
    if not out:
        return BOT
    if len(out) == 1:
        return out[0]
    return Or(tuple(out))


def neg(a) -> Formula:
    if isinstance(a, Top):
        return BOT
    if isinstance(a, Bot):
        return TOP
    if isinstance(a, Not):
        return a.arg
    return Not(a)


def implies(a, b) -> Formula:
    return disj(neg(a), b)


def iff(a, b) -> Formula:
    return conj(implies(a, b), implies(b, a))


def exists(names: Iterable[str], body) -> Formula:
    for v in reversed(list(names)):
        if isinstance(body, (Top, Bot)):
            return body
        if v in free_vars(body):
            body = Exists(v, body)
    return body


def forall(names: Iterable[str], body) -> Formula:
    for v in reversed(list(names)):
        if isinstance(body, (Top, Bot)):
            return body
        if v in free_vars(body):
            body = Forall(v, body)
    return body


def eq_terms(ts: Iterable[Term], us: Iterable[Term]) -> Formula:
    return conj(*(Eq(t, u) for t, u in zip(ts, us)))


# ---------------------------------------------------------- positional


def var(i: int) -> Var:
    return Var(f"x{i}")


def vars_(start: int, count: int) -> list[Var]:
    return [var(i) for i in range(start, start + count)]


def position(name: str) -> int | None:
    if name.startswith("x") and name[1:].isdigit() and name[1] != "0":
        return int(name[1:])
    return None


# ------------------------------------------------------------ traversal


def free_vars(phi) -> frozenset:
    cached = phi.__dict__.get("_fv")
    if cached is not None:
        return cached
    if isinstance(phi, (Top, Bot)):
        out = frozenset()
    elif isinstance(phi, (Eq, Lt)):
        out = term_vars(phi.left) | term_vars(phi.right)
    elif isinstance(phi, (Rel, Tab)):
        out = frozenset().union(*(term_vars(t) for t in phi.args)) if phi.args else frozenset()
    elif isinstance(phi, Not):
        out = free_vars(phi.arg)
    elif isinstance(phi, (And, Or)):
        out = frozenset().union(*(free_vars(a) for a in phi.args))
    elif isinstance(phi, (Exists, Forall)):
        out = free_vars(phi.body) - {phi.var}
    else:
        raise TypeError(f"not a formula: {phi!r}")
    object.__setattr__(phi, "_fv", out)
    return out


def all_vars(phi) -> set:
    """Free and bound variable names."""
    out = set(free_vars(phi))
    stack = [phi]
    while stack:
        p = stack.pop()
        if isinstance(p, (Exists, Forall)):
            out.add(p.var)
            stack.append(p.body)
        elif isinstance(p, Not):
            stack.append(p.arg)
        elif isinstance(p, (And, Or)):
            stack.extend(p.args)
    return out


def max_position(phi) -> int:
    best = 0
    for name in free_vars(phi):
        i = position(name)
        if i is not None:
            best = max(best, i)
    return best


def is_quantifier_free(phi) -> bool:
    if isinstance(phi, (Exists, Forall)):
        return False
    if isinstance(phi, Not):
        return is_quantifier_free(phi.arg)
    if isinstance(phi, (And, Or)):
        return all(is_quantifier_free(a) for a in phi.args)
    return True


def atoms(phi) -> list:
    out = []
    stack = [phi]
    while stack:
        p = stack.pop()
        if isinstance(p, ATOMS):
            out.append(p)
        elif isinstance(p, Not):
            stack.append(p.arg)
        elif isinstance(p, (And, Or)):
            stack.extend(reversed(p.args))
        elif isinstance(p, (Exists, Forall)):
            stack.append(p.body)
    return out


def constants(phi) -> set:
    out = set()
    for a in atoms(phi):
        if isinstance(a, (Eq, Lt)):
            ts = (a.left, a.right)
        else:
            ts = a.args
        for t in ts:
            if isinstance(t, Const):
                out.add(t.value)
    return out


# --------------------------------------------------------- substitution


def subst_term(t: Term, assignment: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return assignment.get(t.name, t)
    if isinstance(t, Const):
        return t
    coeffs: dict = {}
    const = t.const
    for v, c in t.coeffs:
        r = assignment.get(v)
        if r is None:
            coeffs[v] = coeffs.get(v, 0) + c
            continue
        rc, rk = linear_parts(r)
        for w, d in rc.items():
            coeffs[w] = coeffs.get(w, 0) + c * d
        const += c * rk
    return lin(coeffs, const)


def fresh_name(base: str, avoid) -> str:
    name = base + "'"
    while name in avoid:
        name += "'"
    return name


def substitute(phi, assignment: Mapping[str, Term]):
    """Capture-avoiding simultaneous substitution of terms for free variables."""
    assignment = {k: v for k, v in assignment.items() if k in free_vars(phi)}
    if not assignment:
        return phi
    return _subst(phi, assignment)


def _subst(phi, asg):
    if isinstance(phi, (Top, Bot)):
        return phi
    if isinstance(phi, Eq):
        return Eq(subst_term(phi.left, asg), subst_term(phi.right, asg))
    if isinstance(phi, Lt):
        return Lt(subst_term(phi.left, asg), subst_term(phi.right, asg))
    if isinstance(phi, Rel):
        return Rel(phi.name, tuple(subst_term(t, asg) for t in phi.args))
    if isinstance(phi, Tab):
        return Tab(phi.rows, tuple(subst_term(t, asg) for t in phi.args))
    if isinstance(phi, Not):
        return Not(_subst(phi.arg, asg))
    if isinstance(phi, And):
        return And(tuple(_subst(a, asg) for a in phi.args))
    if isinstance(phi, Or):
        return Or(tuple(_subst(a, asg) for a in phi.args))
    if isinstance(phi, (Exists, Forall)):
        inner = {k: v for k, v in asg.items() if k != phi.var and k in free_vars(phi.body)}
        if not inner:
            return phi
        incoming = set()
        for t in inner.values():
            incoming |= term_vars(t)
        v = phi.var
        body = phi.body
        if v in incoming:
            avoid = incoming | all_vars(body) | set(inner)
            nv = fresh_name(v, avoid)
            body = _subst(body, {v: Var(nv)}) if v in free_vars(body) else body
            v = nv
        return type(phi)(v, _subst(body, inner))
    raise TypeError(f"not a formula: {phi!r}")


def apply(phi, args: Iterable) -> Formula:
    """Substitute ``args[i-1]`` for ``xi`` simultaneously."""
    asg = {}
    for i, a in enumerate(args, start=1):
        asg[f"x{i}"] = a if isinstance(a, (Var, Const, Lin)) else Const(a)
    return substitute(phi, asg)


def shift(phi, offset: int, start: int = 1) -> Formula:
    """Renumber ``xi`` to ``x(i+offset)`` for every ``i >= start``."""
    if offset == 0:
        return phi
    asg = {}
    for name in free_vars(phi):
        i = position(name)
        if i is not None and i >= start:
            asg[name] = var(i + offset)
    return substitute(phi, asg)


def bind_positions(phi, first: int, count: int, prefix: str = "_b") -> tuple[Formula, list[str]]:
    """Rename ``x(first)..x(first+count-1)`` to fresh names and close the gap."""
    taken = all_vars(phi)
    names = []
    asg = {}
    for j in range(count):
        n = f"{prefix}{first + j}"
        while n in taken:
            n += "_"
        names.append(n)
        asg[f"x{first + j}"] = Var(n)
    for name in free_vars(phi):
        i = position(name)
        if i is not None and i >= first + count:
            asg[name] = var(i - count)
    return substitute(phi, asg), names
