"""Seeded random sets, maps, structures and fiberings for the audits."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import product as cartesian

from ..discrete.finite import FiniteBackend, FiniteStructure
from ..discrete.pureset import PureSetBackend
from ..fibering import concrete as K
from ..logic.sets import DefinableMap, DefinableSet
from ..logic.syntax import (Const, Eq, Lt, Var, apply, conj, disj, exists, forall, lin, neg,
                            vars_)
from ..semilinear.backend import SemilinearBackend


# ------------------------------------------------------------- formulas


def random_formula(backend, arity: int, rng: random.Random, size: int = 3):
    """A quantifier-free formula in ``x1..x_arity``."""
    atoms = [_atom(backend, arity, rng) for _ in range(size)]
    return _combine(atoms, rng)


def _combine(parts, rng):
    while len(parts) > 1:
        a, b = parts.pop(rng.randrange(len(parts))), parts.pop(rng.randrange(len(parts)))
        if rng.random() < 0.25:
            a = neg(a)
        parts.append(conj(a, b) if rng.random() < 0.5 else disj(a, b))
    return parts[0]


def _atom(backend, arity: int, rng):
    if isinstance(backend, SemilinearBackend):
        vs = rng.sample(range(1, arity + 1), min(arity, rng.choice((1, 1, 2))))
        coeffs = {f"x{i}": rng.choice((-2, -1, 1, 1, 2)) for i in vs}
        t = lin(coeffs, rng.randint(-3, 3))
        zero = Const(Fraction(0))
        return Eq(t, zero) if rng.random() < 0.3 else Lt(t, zero) if rng.random() < 0.5 else Lt(zero, t)
    if isinstance(backend, PureSetBackend):
        i = rng.randint(1, arity)
        if arity > 1 and rng.random() < 0.5:
            j = rng.choice([k for k in range(1, arity + 1) if k != i])
            return Eq(Var(f"x{i}"), Var(f"x{j}"))
        return Eq(Var(f"x{i}"), Const(rng.choice(sorted(backend.sig.const_map.values()))))
    return _finite_atom(backend, arity, rng)


def _finite_atom(backend, arity: int, rng):
    S = backend.S
    pts = list(cartesian(S.base, repeat=arity))
    rows = frozenset(p for p in pts if rng.random() < 0.5)
    return backend.tab(sorted(rows, key=S.row_key), arity)


def random_set(backend, arity: int, rng: random.Random, size: int = 3) -> DefinableSet:
    """A set inside ``C^arity``."""
    phi = random_formula(backend, arity, rng, size)
    return DefinableSet(backend.sig, arity, conj(phi, *[backend.base_atom(i) for i in range(1, arity + 1)]))


def random_map(backend, m: int, n: int, rng: random.Random) -> DefinableMap:
    """A map from a random subset of ``C^m`` to ``C^n``."""
    X = random_set(backend, m, rng)
    x = vars_(1, m)
    outs = []
    for j in range(n):
        if isinstance(backend, SemilinearBackend) and rng.random() < 0.4:
            i, k = rng.randint(1, m), rng.randint(1, m)
            t = lin({f"x{i}": 1, f"x{k}": rng.choice((1, -1))} if i != k else {f"x{i}": 2}, 0)
        elif isinstance(backend, FiniteBackend):
            return _finite_map(backend, X, m, n, rng)
        else:
            t = x[rng.randrange(m)]
        outs.append(Eq(Var(f"x{m + j + 1}"), t))
    G = conj(X.phi, *outs)
    return DefinableMap(DefinableSet(backend.sig, m + n, G), m, n)


def _finite_map(backend, X, m, n, rng):
    S = backend.S
    rows = []
    for p in backend.enumerate(X.phi, m):
        rows.append(p + tuple(rng.choice(S.base) for _ in range(n)))
    G = backend.tab(sorted(rows, key=S.row_key), m + n)
    return DefinableMap(DefinableSet(backend.sig, m + n, G), m, n)


def compose(f: DefinableMap, g: DefinableMap, names=("_c",)) -> DefinableMap:
    """``g o f`` as a graph."""
    m, n, p = f.dom_arity, f.cod_arity, g.cod_arity
    mid = [Var(f"{names[0]}{i}") for i in range(n)]
    G = exists([v.name for v in mid], conj(apply(f.graph.phi, vars_(1, m) + mid),
                                           apply(g.graph.phi, mid + vars_(m + 1, p))))
    return DefinableMap(DefinableSet(f.sig, m + p, G), m, p)


def random_quantified(backend, rng: random.Random, nvars: int = 4, blocks: int = 3, size: int = 4):
    """A prenex formula over ``x1..x_nvars`` whose last variables are bound in
    up to ``blocks`` alternating quantifier blocks."""
    matrix = random_formula(backend, nvars, rng, size)
    nbound = rng.randint(1, nvars - 1)
    bound = [f"x{i}" for i in range(nvars - nbound + 1, nvars + 1)]
    nblocks = rng.randint(1, min(blocks, nbound))
    cuts = sorted(rng.sample(range(1, nbound), nblocks - 1))
    groups = [bound[a:b] for a, b in zip([0] + cuts, cuts + [nbound])]
    q = rng.choice((exists, forall))
    phi = matrix
    for g in reversed(groups):
        phi = q(g, phi)
        q = forall if q is exists else exists
    return phi, nvars - nbound


def random_linear_bijection(rng: random.Random, m: int) -> list:
    """Terms for an invertible map ``Q^m -> Q^m`` (unit triangular times a permutation)."""
    perm = rng.sample(range(1, m + 1), m)
    terms = []
    for i in range(m):
        coeffs = {f"x{perm[i]}": rng.choice((1, -1, 2))}
        for j in range(i):
            if rng.random() < 0.5:
                coeffs[f"x{perm[j]}"] = coeffs.get(f"x{perm[j]}", 0) + rng.choice((1, -1))
        terms.append(lin(coeffs, rng.randint(-2, 2)))
    return terms


# ------------------------------------------------------------- structures


def random_structure(rng: random.Random, max_size: int = 6, name: str = "random") -> FiniteStructure:
    k = rng.randint(2, max_size)
    universe = tuple(range(k))
    nb = rng.randint(2, k)
    base = tuple(sorted(rng.sample(universe, nb)))
    c0, c1 = rng.sample(base, 2)
    rows = frozenset((a, b) for a in universe for b in universe if rng.random() < 0.3)
    return FiniteStructure(universe, base, c0, c1, (("R", rows),), name)


# ------------------------------------------------------------- fiberings


def random_fibering_tree(S: FiniteStructure, rng: random.Random, r: int, m: int, max_points: int = 6,
                         max_arity: int = 3, base=None):
    """A valid random tree over ``base`` (drawn when None), or None when the
    draw cannot be realized."""
    ctx = K.Ctx(frozenset(S.base), S.c0, S.c1, {e: i for i, e in enumerate(S.universe)})
    if base is None:
        pts = list(cartesian(S.universe, repeat=m))
        k = rng.randint(1, min(max_points, len(pts)))
        X = frozenset(rng.sample(pts, k))
    else:
        X = frozenset(base)
    try:
        T = _tree(S, ctx, rng, r, m, X, max_arity)
    except _Unrealizable:
        return None
    K.certify(T, ctx)
    return T


class _Unrealizable(Exception):
    pass


def _tree(S, ctx, rng, r, m, X, max_arity):
    C = list(S.base)
    U = list(S.universe)
    order = ctx.sort(X)
    if r == 0:
        n = 1
        while len(C) ** n < len(X):
            n += 1
        if rng.random() < 0.3:
            n += 1
        if n > max_arity:
            raise _Unrealizable
        targets = rng.sample(list(cartesian(C, repeat=n)), len(X))
        g1 = dict(zip(order, targets))
        return K.Tree(0, m, (), (n,), X, g1, {})
    n1 = rng.randint(1, 2)
    k = rng.randint(1, min(3, len(X)))
    imgs = rng.sample(list(cartesian(U, repeat=n1)), min(k, len(U) ** n1))
    g1 = {w: rng.choice(imgs) for w in order}
    img = ctx.sort(set(g1.values()))
    m1 = 1
    while len(U) ** m1 < len(img):
        m1 += 1
    if m1 > max_arity:
        raise _Unrealizable
    params = rng.sample(list(cartesian(U, repeat=m1)), len(img))
    subs = {}
    for y, x in zip(img, params):
        dom = frozenset(w + u for w in order if g1[w] == y for u in img)
        subs[x] = _tree(S, ctx, rng, r - 1, m + n1, dom, max_arity)
    spare = [p for p in cartesian(U, repeat=m1) if p not in subs]
    if spare and rng.random() < 0.3:
        proto = next(iter(subs.values()))
        w = rng.choice(list(cartesian(U, repeat=m + n1)))
        out = tuple(rng.choice(U) for _ in range(proto.n_list[0]))
        subs[rng.choice(spare)] = K.Tree(r - 1, m + n1, proto.m_list, proto.n_list, frozenset([w]),
                                         {w: out}, {})
    return _pad(K.Tree(r, m, (m1,), (n1,), X, g1, subs), ctx)


def _pad(T, ctx):
    """Bring all sub-trees to common arity lists by padding with ``c0``."""
    cm = tuple(max(c) for c in zip(*[S.m_list for S in T.subs.values()])) if T.r > 1 else ()
    cn = tuple(max(c) for c in zip(*[S.n_list for S in T.subs.values()]))
    subs = {x: K.transform(S, ctx, cm, cn) for x, S in T.subs.items()}
    return K.Tree(T.r, T.m, T.m_list + cm, T.n_list + cn, T.base, T.g1, subs)
