"""The ordered Q-vector-space backend: dimension and Euler characteristic."""

from __future__ import annotations

from fractions import Fraction

from ..backend import Backend
from ..logic.signature import qvs_signature
from ..logic.syntax import Const, apply, exists
from ..memo import memoized
from ..semiring import INT, NEG_INF, TROP, make
from . import cad
from .linear import eval_nnf, from_nnf, mk_and, mk_or, substitute_atom, to_nnf
from .qe import qe_nnf


class SemilinearBackend(Backend):
    """``C`` is ``M`` unless a unary formula in ``x1`` is given for it."""

    name = "semilinear"
    kinds = {"euler": INT, "dim": TROP}

    def __init__(self, sig=None, base=None):
        super().__init__(sig or qvs_signature())
        if isinstance(base, str):
            base = self.parse(base)
        self.base_phi = None if base is None else from_nnf(qe_nnf(base))
        self.base = self._expand_base

    def __repr__(self):
        return f"SemilinearBackend(base={self.base_phi!r})"

    def _expand_base(self, term):
        if self.base_phi is None:
            return True
        return to_nnf(apply(self.base_phi, [term]), True, None)

    def nnf(self, phi):
        return _qe_nnf(self, phi)

    def qe(self, phi):
        return from_nnf(self.nnf(phi))

    def holds(self, phi, point) -> bool:
        node = _qe_nnf(self, apply(phi, [Const(Fraction(v)) for v in point]))
        return node is True

    def find_point(self, phi, arity: int):
        node = self.nnf(phi)
        point = []
        for i in range(1, arity + 1):
            rest = [f"x{j}" for j in range(i + 1, arity + 1)]
            cur = qe_nnf(exists(rest, from_nnf(node)), self.base) if rest else node
            v = _pick_1d(cur, f"x{i}")
            if v is None:
                return None
            point.append(v)
            node = _subst(node, f"x{i}", v)
        return tuple(point) if node is not False else None

    def measure(self, kind: str, phi, arity: int):
        return _measure(self, kind, phi, arity)

    def decompose(self, phi, arity: int, reverse: bool = False):
        return cad.decompose(self.qe(phi), arity, None, cad.default_order(arity, reverse))

    def param_classes(self, phi, k: int, m: int, kind: str):
        return _param_classes(self, phi, k, m, kind)

    def random_point(self, rng, arity: int) -> tuple:
        return tuple(Fraction(rng.randint(-64, 64), rng.choice((1, 2, 3, 4, 8))) for _ in range(arity))


def _subst(node, v: str, value, coeffs=None):
    """Replace ``v`` by ``coeffs + value`` throughout an NNF."""
    if node is True or node is False:
        return node
    if node[0] == "atom":
        a = substitute_atom(node[1], v, coeffs or {}, value)
        return a if a is True or a is False else ("atom", a)
    parts = [_subst(s, v, value, coeffs) for s in node[1]]
    return mk_and(parts) if node[0] == "and" else mk_or(parts)


def _solve_out(node, names):
    """Drop variables fixed by a top-level equation, substituting their solution.

    The solution set maps bijectively and linearly onto the reduced one, so
    dimension and Euler value are unchanged.  Returns the reduced NNF and
    the variables of ``names`` still present.
    """
    names = list(names)
    while node is not True and node is not False:
        items = node[1] if node[0] == "and" else (node,)
        hit = None
        for it in items:
            if it[0] == "atom" and it[1][0] == "=":
                coeffs = dict(it[1][1])
                v = next((w for w in reversed(names) if w in coeffs), None)
                if v is not None:
                    hit = (v, coeffs, it[1][2])
                    break
        if hit is None:
            break
        v, coeffs, const = hit
        c = coeffs.pop(v)
        node = _subst(node, v, -const / c, {w: -d / c for w, d in coeffs.items()})
        names.remove(v)
    return node, names


def _pick_1d(node, v: str):
    """A simple rational satisfying a one-variable NNF, or None."""
    if node is True:
        return Fraction(0)
    if node is False:
        return None
    crit = set()
    stack = [node]
    while stack:
        n = stack.pop()
        if n is True or n is False:
            continue
        if n[0] == "atom":
            rel, coeffs, const = n[1]
            if len(coeffs) == 1:
                crit.add(-const / coeffs[0][1])
        else:
            stack.extend(n[1])
    pts = sorted(crit)
    cands = [Fraction(0)] + pts
    cands += [(a + b) / 2 for a, b in zip(pts, pts[1:])]
    if pts:
        cands += [pts[0] - 1, pts[-1] + 1]
    for c in sorted(dict.fromkeys(cands), key=lambda t: (abs(t.denominator), abs(t), t < 0)):
        if eval_nnf(node, {v: c}):
            return c
    return None


@memoized
def _qe_nnf(b: SemilinearBackend, phi):
    return qe_nnf(phi, b.base)


def _value(kind: str, vals):
    if kind == "euler":
        return make(INT, sum((-1) ** d for d in vals))
    return make(TROP, max(vals) if vals else NEG_INF)


@memoized
def _measure(b: SemilinearBackend, kind: str, phi, arity: int):
    if kind not in b.kinds:
        raise ValueError(f"unknown measure {kind!r} for semilinear backend")
    node, rest = _solve_out(b.nnf(phi), [f"x{i}" for i in range(1, arity + 1)])
    if node is False:
        return _value(kind, [])
    d = cad.decompose(from_nnf(node), len(rest), None, tuple(rest))
    return _value(kind, [c.dim for c in d.cells])


@memoized
def _param_classes(b: SemilinearBackend, phi, k: int, m: int, kind: str):
    out = []
    params = tuple(f"x{i}" for i in range(1, k + 1))
    node, rest = _solve_out(b.nnf(phi), [f"x{i}" for i in range(k + 1, k + m + 1)])
    order = params + tuple(rest)
    for phi_v, raw in cad.param_classes(from_nnf(node), k, len(rest), None, kind, order):
        if kind == "euler":
            v = make(INT, raw)
        else:
            v = make(TROP, NEG_INF if raw is None else raw)
        out.append((phi_v, v))
    return sorted(out, key=lambda t: t[1].sort_key())
