"""The pure-set backend: an infinite set with equality and named constants.

Constants name pairwise distinct elements.  Quantifiers are eliminated by
the finite-exceptions normal form: ``E z psi`` is equivalent to the
disjunction of ``psi[z:=t]`` over the terms ``t`` of ``psi`` together with
``psi`` at a generic ``z`` (one different from every such term).

Two measures live here.  ``morley`` is Morley rank (values in the tropical
semiring), computed by recursion on the last-coordinate projection.
``pure_euler`` is the integer measure with ``E(finite d-set) = d`` and
``E(cofinite set missing d points) = 1 - d``.
"""

from __future__ import annotations

from ..backend import Backend
from ..errors import SortError
from ..logic.signature import pure_set_signature
from ..logic.syntax import (And, Bot, Const, Eq, Exists, Forall, Lt, Not, Or, Rel, Top, Var,
                            apply, conj, disj, neg, vars_)
from ..memo import memoized
from ..semiring import INT, NEG_INF, TROP, make

# NNF: True/False, ("eq", a, b), ("ne", a, b), ("and", items), ("or", items).
# Terms are ("v", name) or ("c", name).


def _term(t):
    if isinstance(t, Var):
        return ("v", t.name)
    if isinstance(t, Const):
        return ("c", t.value)
    raise SortError(f"term {t!r} not in the pure-set signature")


def _lit(pos: bool, a, b):
    if a == b:
        return pos
    if a[0] == "c" and b[0] == "c":
        return not pos
    a, b = sorted((a, b))
    return ("eq" if pos else "ne", a, b)


def _and(items):
    out, seen = [], set()
    for it in items:
        if it is False:
            return False
        if it is True:
            continue
        for s in (it[1] if it[0] == "and" else (it,)):
            if s not in seen:
                seen.add(s)
                out.append(s)
    for s in out:
        if s[0] in ("eq", "ne") and (("ne" if s[0] == "eq" else "eq"),) + s[1:] in seen:
            return False
    if not out:
        return True
    return out[0] if len(out) == 1 else ("and", tuple(out))


def _or(items):
    out, seen = [], set()
    for it in items:
        if it is True:
            return True
        if it is False:
            continue
        for s in (it[1] if it[0] == "or" else (it,)):
            if s not in seen:
                seen.add(s)
                out.append(s)
    for s in out:
        if s[0] in ("eq", "ne") and (("ne" if s[0] == "eq" else "eq"),) + s[1:] in seen:
            return True
    if not out:
        return False
    return out[0] if len(out) == 1 else ("or", tuple(out))


def _not(n):
    if n is True or n is False:
        return not n
    if n[0] == "eq":
        return ("ne", n[1], n[2])
    if n[0] == "ne":
        return ("eq", n[1], n[2])
    parts = [_not(s) for s in n[1]]
    return _or(parts) if n[0] == "and" else _and(parts)


def _subst(n, v, t):
    """Replace variable term ``v`` by term ``t``."""
    if n is True or n is False:
        return n
    if n[0] in ("eq", "ne"):
        a = t if n[1] == v else n[1]
        b = t if n[2] == v else n[2]
        return _lit(n[0] == "eq", a, b)
    parts = [_subst(s, v, t) for s in n[1]]
    return _and(parts) if n[0] == "and" else _or(parts)


def _generic(n, v):
    """``n`` at a ``v`` distinct from every other term."""
    if n is True or n is False:
        return n
    if n[0] in ("eq", "ne"):
        if v in (n[1], n[2]):
            return n[0] == "ne"
        return n
    parts = [_generic(s, v) for s in n[1]]
    return _and(parts) if n[0] == "and" else _or(parts)


def _terms(n, out):
    if n is True or n is False:
        return out
    if n[0] in ("eq", "ne"):
        out.add(n[1])
        out.add(n[2])
    else:
        for s in n[1]:
            _terms(s, out)
    return out


def _eliminate(n, v):
    others = sorted(t for t in _terms(n, set()) if t != v)
    if v not in _terms(n, set()):
        return n
    return _or([_subst(n, v, t) for t in others] + [_generic(n, v)])


def to_nnf(phi, positive: bool = True):
    if isinstance(phi, Top):
        return positive
    if isinstance(phi, Bot):
        return not positive
    if isinstance(phi, Eq):
        return _lit(positive, _term(phi.left), _term(phi.right))
    if isinstance(phi, Rel):
        # the base predicate is all of M here
        return positive
    if isinstance(phi, Not):
        return to_nnf(phi.arg, not positive)
    if isinstance(phi, (And, Or)):
        parts = [to_nnf(a, positive) for a in phi.args]
        return _and(parts) if isinstance(phi, And) == positive else _or(parts)
    if isinstance(phi, Exists):
        inner = _eliminate(to_nnf(phi.body, True), ("v", phi.var))
        return inner if positive else _not(inner)
    if isinstance(phi, Forall):
        inner = _not(_eliminate(to_nnf(phi.body, False), ("v", phi.var)))
        return inner if positive else _not(inner)
    if isinstance(phi, Lt):
        raise SortError("order is not in the pure-set signature")
    raise TypeError(f"unsupported node {phi!r}")


def _ast_term(t):
    return Var(t[1]) if t[0] == "v" else Const(t[1])


def from_nnf(n):
    if n is True:
        return Top()
    if n is False:
        return Bot()
    if n[0] == "eq":
        return Eq(_ast_term(n[1]), _ast_term(n[2]))
    if n[0] == "ne":
        return Not(Eq(_ast_term(n[1]), _ast_term(n[2])))
    parts = [from_nnf(s) for s in n[1]]
    return conj(*parts) if n[0] == "and" else disj(*parts)


def _eval(n, env) -> bool:
    """Evaluate with every term resolved to a constant name."""
    if n is True or n is False:
        return n
    if n[0] in ("eq", "ne"):
        a = env.get(n[1][1], n[1][1]) if n[1][0] == "v" else n[1][1]
        b = env.get(n[2][1], n[2][1]) if n[2][0] == "v" else n[2][1]
        return (a == b) == (n[0] == "eq")
    test = all if n[0] == "and" else any
    return test(_eval(s, env) for s in n[1])


# ---------------------------------------------------------------- types


def equality_types(k: int, consts):
    """Equality types of k-tuples over ``consts``.

    Each type is a tuple assigning every coordinate either ``("c", name)`` or
    ``("new", j)``, with new blocks numbered in order of first appearance.
    """
    consts = sorted(consts)
    out = []

    def go(i, cur, nblocks):
        if i == k:
            out.append(tuple(cur))
            return
        for c in consts:
            go(i + 1, cur + [("c", c)], nblocks)
        for j in range(nblocks):
            go(i + 1, cur + [("new", j)], nblocks)
        go(i + 1, cur + [("new", nblocks)], nblocks + 1)

    go(0, [], 0)
    return out


def _representative(tp, avoid):
    names = {}
    out = []
    n = 0
    for kind, val in tp:
        if kind == "c":
            out.append(val)
        else:
            if val not in names:
                n += 1
                name = f"_e{n}"
                while name in avoid:
                    n += 1
                    name = f"_e{n}"
                names[val] = name
            out.append(names[val])
    return tuple(out)


def type_formula(tp, consts, first: int = 1):
    parts = []
    for i, (kind, val) in enumerate(tp):
        x = Var(f"x{first + i}")
        if kind == "c":
            parts.append(Eq(x, Const(val)))
            continue
        for c in sorted(consts):
            parts.append(neg(Eq(x, Const(c))))
        for j in range(i):
            other = Var(f"x{first + j}")
            if tp[j] == tp[i]:
                parts.append(Eq(x, other))
            elif tp[j][0] == "new":
                parts.append(neg(Eq(x, other)))
    return conj(*parts)


def _consts(n):
    return {t[1] for t in _terms(n, set()) if t[0] == "c"}


# ------------------------------------------------------------ the backend


class PureSetBackend(Backend):
    name = "pureset"
    kinds = {"morley": TROP, "pure_euler": INT}

    def __init__(self, sig=None):
        super().__init__(sig or pure_set_signature())

    def __repr__(self):
        return "PureSetBackend()"

    def nnf(self, phi):
        return _nnf(phi)

    def qe(self, phi):
        return from_nnf(_nnf(phi))

    def holds(self, phi, point) -> bool:
        return _eval(_nnf(phi), {f"x{i}": v for i, v in enumerate(point, start=1)})

    def find_point(self, phi, arity: int):
        n = _nnf(phi)
        consts = _consts(n)
        for tp in equality_types(arity, consts):
            p = _representative(tp, consts)
            if _eval(n, {f"x{i}": v for i, v in enumerate(p, start=1)}):
                return p
        return None

    def measure(self, kind: str, phi, arity: int):
        if kind == "morley":
            r = morley_rank(_nnf(phi), arity)
            return make(TROP, NEG_INF if r is None else r)
        if kind == "pure_euler":
            return make(INT, pure_euler(_nnf(phi), arity))
        raise ValueError(f"unknown measure {kind!r} for the pure-set backend")

    def random_point(self, rng, arity: int) -> tuple:
        pool = sorted(self.sig.const_map.values()) + [f"_r{i}" for i in range(arity)]
        return tuple(rng.choice(pool) for _ in range(arity))

    def param_classes(self, phi, k: int, m: int, kind: str):
        n = _nnf(phi)
        consts = _consts(n)
        groups: dict = {}
        for tp in equality_types(k, consts):
            p = _representative(tp, consts)
            section = _nnf(apply(from_nnf(n), [Const(v) for v in p] + vars_(1, m)))
            v = self.measure(kind, from_nnf(section), m)
            groups.setdefault(v, []).append(type_formula(tp, consts))
        return [(disj(*groups[v]), v) for v in sorted(groups, key=lambda t: t.sort_key())]


@memoized
def _nnf(phi):
    return to_nnf(phi, True)


@memoized
def morley_rank(n, arity: int):
    """Rank of ``{x1..x_arity : n}``; None stands for the empty set."""
    if arity == 0:
        return 0 if _eval(n, {}) else None
    v = ("v", f"x{arity}")
    gen = _generic(n, v)
    others = sorted(t for t in _terms(n, set()) if t != v)
    some = _or([_subst(n, v, t) for t in others])
    r1 = morley_rank(gen, arity - 1)
    r0 = morley_rank(_and([_not(gen), some]), arity - 1)
    cands = [r for r in (None if r1 is None else r1 + 1, r0) if r is not None]
    return max(cands) if cands else None


def free_coordinate_rank(n, arity: int):
    """Oracle: the most new blocks among equality types meeting the set."""
    consts = _consts(n)
    best = None
    for tp in equality_types(arity, consts):
        p = _representative(tp, consts)
        if _eval(n, {f"x{i}": v for i, v in enumerate(p, start=1)}):
            j = len({val for kind, val in tp if kind == "new"})
            best = j if best is None else max(best, j)
    return best


@memoized
def pure_euler(n, arity: int) -> int:
    """Sum over the equality types in the set of the Euler value of their locus."""
    consts = _consts(n)
    total = 0
    for tp in equality_types(arity, consts):
        p = _representative(tp, consts)
        if _eval(n, {f"x{i}": v for i, v in enumerate(p, start=1)}):
            j = len({val for kind, val in tp if kind == "new"})
            val = 1
            for i in range(j):
                val *= 1 - len(consts) - i
            total += val
    return total
