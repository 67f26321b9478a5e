"""Formula-level fibering operations for the symbolic backends.

Sets handed around here are callables from a list of terms to a formula, so
nothing depends on positional numbering until a graph is written back.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from ..logic.syntax import (Eq, Rel, Var, apply, conj, disj, exists, forall, iff, implies, neg,
                            shift, substitute, var, vars_)


class Names:
    """Deterministic fresh variable names."""

    def __init__(self, prefix: str = "_s"):
        self.prefix = prefix
        self.count = itertools.count(1)

    def take(self, k: int) -> list:
        return [f"{self.prefix}{next(self.count)}" for _ in range(k)]

    def terms(self, k: int) -> list:
        return [Var(v) for v in self.take(k)]


@dataclass(frozen=True)
class SymFib:
    """The tail ``(f_level, ..)`` of a fibering with its parameter prefix fixed."""

    r: int
    m: int
    m_list: tuple
    n_list: tuple
    graphs: tuple
    level: int = 0
    params: tuple = ()

    @classmethod
    def of(cls, F) -> "SymFib":
        return cls(F.r, F.m, tuple(F.m_list), tuple(F.n_list), tuple(g.phi for g in F.maps))

    def g1(self, w, v):
        return apply(self.graphs[self.level], list(self.params) + list(w) + list(v))

    def sub(self, z) -> "SymFib":
        return SymFib(self.r - 1, self.m + self.n_list[0], self.m_list[1:], self.n_list[1:],
                      self.graphs, self.level + 1, self.params + tuple(z))


def image(F: SymFib, D, names: Names):
    def img(u):
        w = names.take(F.m)
        return exists(w, conj(D([Var(x) for x in w]), F.g1([Var(x) for x in w], u)))
    return img


def fiber(F: SymFib, D, y):
    return lambda w: conj(D(w), F.g1(w, y))


def product_set(A, B, a: int):
    return lambda t: conj(A(list(t[:a])), B(list(t[a:])))


def validity(F: SymFib, D, names: Names, base_pred: str, exact_depth: int | None = None):
    """Formula (free in the parameter names) saying ``F`` fibers ``D``.

    ``exact_depth`` truncates the recursion: below it only the domain
    condition is kept.
    """
    w = names.terms(F.m)
    v = names.take(F.n_list[0])
    has = exists(v, F.g1(w, [Var(x) for x in v]))
    dom_ok = forall([t.name for t in w], iff(has, D(w)))
    if exact_depth == 0:
        return dom_ok
    if F.r == 0:
        w2 = names.terms(F.m)
        out = names.terms(F.n_list[0])
        same = conj(*[Eq(a, b) for a, b in zip(w, w2)])
        inj = forall([t.name for t in w + w2 + out],
                     implies(conj(F.g1(w, out), F.g1(w2, out)), same))
        in_c = forall([t.name for t in w + out],
                      implies(F.g1(w, out), conj(*[Rel(base_pred, (o,)) for o in out])))
        return conj(dom_ok, inj, in_c)
    img = image(F, D, names)
    y = names.terms(F.n_list[0])
    z = names.take(F.m_list[0])
    sub = F.sub([Var(x) for x in z])
    Dy = product_set(fiber(F, D, y), img, F.m)
    nxt = None if exact_depth is None else exact_depth - 1
    inner = exists(z, validity(sub, Dy, names, base_pred, nxt))
    return conj(dom_ok, forall([t.name for t in y], implies(img(y), inner)))


def positionalize(phi, names: list):
    """Named variables become ``x1..xk``; positional ones move up by k."""
    phi = shift(phi, len(names))
    return substitute(phi, {n: var(i) for i, n in enumerate(names, start=1)})


def restrict_graphs(F: SymFib, D, Dp, names: Names, base_pred: str) -> list:
    """Graphs of the restriction to ``Dp``; positional in the local layout."""
    m, n1 = F.m, F.n_list[0]
    w, v = vars_(1, m), vars_(m + 1, n1)
    out = [conj(Dp(w), F.g1(w, v))]
    if F.r == 0:
        return out
    y = names.terms(n1)
    z = names.take(F.m_list[0])
    sub = F.sub([Var(x) for x in z])
    img, img_p = image(F, D, names), image(F, Dp, names)
    Dy = product_set(fiber(F, D, y), img, m)
    Dpy = product_set(fiber(F, Dp, y), img_p, m)
    cond = conj(img_p(y), validity(sub, Dy, names, base_pred))
    for h in restrict_graphs(sub, Dy, Dpy, names, base_pred):
        g = exists([t.name for t in y], conj(cond, h))
        out.append(positionalize(g, z))
    return out


def set_of(phi):
    """A positional formula as a term-callable set."""
    return lambda t: apply(phi, list(t))


def pad_eqs(terms, const):
    return conj(*[Eq(t, const) for t in terms])


def combine0(G0, n0: int, G1, n1: int, m: int, c0, c1):
    """Graph of the glued 0-step map with a tag coordinate on the output.

    ``c0``/``c1`` are constant terms; ``G1`` should already avoid the
    domain of ``G0``.
    """
    N = max(n0, n1) + 1
    w = vars_(1, m)
    outs = vars_(m + 1, N)
    parts = []
    for G, n, tag in ((G0, n0, c0), (G1, n1, c1)):
        parts.append(conj(apply(G, w + outs[:n]), pad_eqs(outs[n:N - 1], c0), pad_eqs([outs[-1]], tag)))
    return disj(*parts), N


def neg_set(D):
    return lambda t: neg(D(t))
