"""Fiberings over a finite structure as explicit trees of tables.

A ``Tree`` holds the first map ``f1`` as a dict from domain points to output
tuples and, for each parameter tuple ``x`` with a nonempty domain, the tree of
``(f2(x,-), .., f_{r+1}(x,-))``.  Everything here is exhaustive.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import (AmbientMismatch, ImageEscapesBase, InvalidFibering, MalformedFibering,
                      NoParameterForFiber, NotASubset, NotFunctional, NotInjective)
from ..logic.sets import DefinableSet
from ..logic.syntax import Tab, vars_
from .record import Fibering, dom_len, param_len


@dataclass(eq=False)
class Tree:
    r: int
    m: int
    m_list: tuple
    n_list: tuple
    base: frozenset
    g1: dict
    subs: dict = field(default_factory=dict)


@dataclass(eq=False)
class Cert:
    """For each image point ``y``: the chosen parameter and its sub-certificate."""

    choice: dict


@dataclass(frozen=True)
class Ctx:
    C: frozenset
    c0: object
    c1: object
    rank: dict

    def key(self, t):
        return tuple(self.rank[e] for e in t)

    def sort(self, items):
        return sorted(items, key=self.key)


def ctx_for(backend) -> Ctx:
    S = backend.S
    return Ctx(frozenset(S.base), S.c0, S.c1, {e: i for i, e in enumerate(S.universe)})


# ------------------------------------------------------------ conversion


def from_fibering(F: Fibering, backend) -> Tree:
    tables, children = [], []
    for j, g in enumerate(F.maps, start=1):
        L, D = param_len(F.m_list, j), dom_len(F.m, F.n_list, j)
        t: dict = {}
        for row in backend.enumerate(g.phi, F.arity(j)):
            pre, dom, out = row[:L], row[L:L + D], row[L + D:]
            d = t.setdefault(pre, {})
            if dom in d and d[dom] != out:
                raise NotFunctional(f"f{j} has two outputs at one point",
                                    {"param": list(pre), "x": list(dom), "y": list(d[dom]), "y'": list(out)})
            d[dom] = out
        tables.append(t)
        kids: dict = {}
        if j > 1:
            Lp = param_len(F.m_list, j - 1)
            for pre in t:
                kids.setdefault(pre[:Lp], []).append(pre[Lp:])
        children.append(kids)
    base = frozenset(backend.enumerate(F.base.phi, F.m))
    g1 = tables[0].get((), {})
    if set(g1) != base:
        bad = sorted(set(g1) ^ base, key=lambda t: tuple(map(str, t)))[0]
        raise MalformedFibering("domain of f1 differs from the base", {"point": list(bad)})
    return _build(F, tables, children, 1, (), F.m)


def _build(F, tables, children, j, prefix, m):
    r = F.r - (j - 1)
    g = dict(tables[j - 1].get(prefix, {}))
    subs = {}
    if r > 0:
        for x in children[j].get(prefix, []):
            subs[x] = _build(F, tables, children, j + 1, prefix + x, m + F.n_list[j - 1])
    return Tree(r, m, F.m_list[j - 1:], F.n_list[j - 1:], frozenset(g), g, subs)


def to_fibering(T: Tree, backend, base_phi=None) -> Fibering:
    rows = [set() for _ in range(T.r + 1)]

    def walk(node, depth, prefix):
        for w, out in node.g1.items():
            rows[depth].add(prefix + w + out)
        for x, S in node.subs.items():
            walk(S, depth + 1, prefix + x)

    walk(T, 0, ())
    sig = backend.sig
    maps = []
    for j in range(1, T.r + 2):
        from .record import graph_arity
        a = graph_arity(T.m, T.m_list, T.n_list, j)
        maps.append(DefinableSet(sig, a, Tab(frozenset(rows[j - 1]), tuple(vars_(1, a)))))
    phi = base_phi if base_phi is not None else Tab(frozenset(T.base), tuple(vars_(1, T.m)))
    return Fibering(T.r, T.m, T.m_list, T.n_list, DefinableSet(sig, T.m, phi), tuple(maps))


# ------------------------------------------------------------ validation


@dataclass
class Fail:
    kind: type
    message: str
    witness: object


def _fibers(g1: dict) -> dict:
    out: dict = {}
    for w, y in g1.items():
        out.setdefault(y, []).append(w)
    return out


def check(T: Tree, ctx: Ctx, required=None):
    """``Cert`` when ``T`` is a fibering of ``required`` (default: its base), else ``Fail``."""
    dom = frozenset(T.g1)
    if required is not None and dom != required:
        return Fail(MalformedFibering, "domain mismatch", None)
    if T.r == 0:
        seen = {}
        for w in ctx.sort(T.g1):
            out = T.g1[w]
            if any(c not in ctx.C for c in out):
                return Fail(ImageEscapesBase, "image point outside C", {"x": list(w), "y": list(out)})
            if out in seen:
                return Fail(NotInjective, "two points share an image",
                            {"x": list(seen[out]), "x'": list(w), "y": list(out)})
            seen[out] = w
        return Cert({})
    fib = _fibers(T.g1)
    img = ctx.sort(fib)
    index: dict = {}
    for x in ctx.sort(T.subs):
        index.setdefault(frozenset(T.subs[x].g1), []).append(x)
    choice = {}
    for y in img:
        req = frozenset(w + u for w in fib[y] for u in img)
        for x in index.get(req, []):
            c = check(T.subs[x], ctx, req)
            if isinstance(c, Cert):
                choice[y] = (x, c)
                break
        else:
            return Fail(NoParameterForFiber, "no parameter yields a fibering of this fiber",
                        {"y": list(y)})
    return Cert(choice)


def certify(T: Tree, ctx: Ctx) -> Cert:
    c = check(T, ctx)
    if isinstance(c, Fail):
        raise c.kind(c.message, c.witness)
    return c


# ----------------------------------------------------------- restriction


def restrict(T: Tree, Xp, ctx: Ctx) -> Tree:
    Xp = frozenset(Xp)
    if not Xp <= T.base:
        w = ctx.sort(Xp - T.base)[0]
        raise NotASubset("restriction target leaves the base", {"point": list(w)})
    return _restrict(T, Xp, ctx)


def _restrict(T: Tree, Xp, ctx):
    g1 = {w: T.g1[w] for w in Xp}
    if T.r == 0:
        return Tree(0, T.m, T.m_list, T.n_list, Xp, g1, {})
    fib = _fibers(T.g1)
    img = frozenset(fib)
    img_p = frozenset(g1.values())
    by_dom: dict = {}
    for y in img_p:
        by_dom[frozenset(w + u for w in fib[y] for u in img)] = y
    subs = {}
    for x in ctx.sort(T.subs):
        S = T.subs[x]
        y = by_dom.get(frozenset(S.g1))
        if y is None or isinstance(check(S, ctx, frozenset(S.g1)), Fail):
            continue
        target = frozenset(w + u for w in fib[y] if w in Xp for u in img_p)
        subs[x] = _restrict(S, target, ctx)
    return Tree(T.r, T.m, T.m_list, T.n_list, Xp, g1, subs)


# -------------------------------------------------------- re-embedding


def transform(T: Tree, ctx: Ctx, m_list=None, n_list=None, amap=None, new_m=None,
              tag_out=(), tag_key=()) -> Tree:
    """Pad arities with ``c0`` and move the ambient along ``amap``.

    Outputs of ``f1`` become ``out + (c0,..) + tag_out``; parameter tuples
    of the first block become ``tag_key + x + (c0,..)``.
    """
    m_list = tuple(T.m_list if m_list is None else m_list)
    n_list = tuple(T.n_list if n_list is None else n_list)
    new_m = T.m if new_m is None else new_m
    amap = amap or (lambda p: p)
    n1, N1 = T.n_list[0], n_list[0]
    pad_out = (ctx.c0,) * (N1 - n1 - len(tag_out)) + tuple(tag_out)

    def outmap(v):
        return v + pad_out

    g1 = {amap(w): outmap(v) for w, v in T.g1.items()}
    base = frozenset(amap(w) for w in T.base)
    subs = {}
    if T.r > 0:
        m1, M1 = T.m_list[0], m_list[0]
        pad_key = (ctx.c0,) * (M1 - m1 - len(tag_key))
        m_old = T.m

        def lifted(p):
            return amap(p[:m_old]) + outmap(p[m_old:])

        for x, S in T.subs.items():
            subs[tuple(tag_key) + x + pad_key] = transform(S, ctx, m_list[1:], n_list[1:], lifted,
                                                           new_m + N1)
    return Tree(T.r, new_m, m_list, n_list, base, g1, subs)


def product(P: Tree, cP: Cert, Q: Tree, cQ: Cert, ctx: Ctx) -> Tree:
    """Fibering of ``P.base x Q.base`` from fiberings of the factors."""
    if P.r != Q.r:
        raise MalformedFibering("product needs equal step counts")
    g1 = {p + q: P.g1[p] + Q.g1[q] for p in P.g1 for q in Q.g1}
    m_list = tuple(a + b for a, b in zip(P.m_list, Q.m_list))
    n_list = tuple(a + b for a, b in zip(P.n_list, Q.n_list))
    subs = {}
    if P.r > 0:
        mP, nP, mQ = P.m, P.n_list[0], Q.m

        def perm(s):
            return s[:mP] + s[mP + nP:mP + nP + mQ] + s[mP:mP + nP] + s[mP + nP + mQ:]

        for yP in ctx.sort(cP.choice):
            xP, sP = cP.choice[yP]
            for yQ in ctx.sort(cQ.choice):
                xQ, sQ = cQ.choice[yQ]
                if xP + xQ in subs:
                    continue
                S = product(P.subs[xP], sP, Q.subs[xQ], sQ, ctx)
                subs[xP + xQ] = transform(S, ctx, amap=perm)
    return Tree(P.r, P.m + Q.m, m_list, n_list, frozenset(g1), g1, subs)


# ------------------------------------------------------------- combining


def combine(F0: Tree, F1: Tree, ctx: Ctx) -> Tree:
    if F0.m != F1.m:
        raise AmbientMismatch(f"ambient arities {F0.m} and {F1.m} differ")
    if F0.r != F1.r:
        raise MalformedFibering(f"step counts {F0.r} and {F1.r} differ")
    for F in (F0, F1):
        c = check(F, ctx)
        if isinstance(c, Fail):
            raise InvalidFibering(f"cannot combine an invalid fibering: {c.message}", c.witness)
    F1 = restrict(F1, F1.base - F0.base, ctx)
    r, m = F0.r, F0.m
    n1 = max(F0.n_list[0], F1.n_list[0]) + 1
    sides = [transform(F, ctx, n_list=(n1,) + F.n_list[1:], tag_out=(tag,))
             for F, tag in ((F0, ctx.c0), (F1, ctx.c1))]
    g1 = {**sides[0].g1, **sides[1].g1}
    base = sides[0].base | sides[1].base
    if r == 0:
        return Tree(0, m, (), (n1,), base, g1, {})
    certs = [certify(T, ctx) for T in sides]
    fibs = [_fibers(T.g1) for T in sides]
    completed = []
    for l, T in enumerate(sides):
        subs = dict(T.subs)
        o = 1 - l
        if fibs[o]:
            y1 = ctx.sort(fibs[o])[0]
            x1, _ = certs[o].choice[y1]
            w1 = ctx.sort(fibs[o][y1])[0]
            img_o = frozenset(fibs[o])
            Q = restrict(sides[o].subs[x1], {w1 + u for u in img_o}, ctx)
            Q = transform(Q, ctx, amap=lambda p: p[m:], new_m=n1)
            cQ = certify(Q, ctx)
            for y in ctx.sort(certs[l].choice):
                x, _ = certs[l].choice[y]
                S = T.subs[x]
                P = restrict(S, {w + y for w in fibs[l][y]}, ctx)
                P = transform(P, ctx, amap=lambda p: p[:m], new_m=m)
                B = product(P, certify(P, ctx), Q, cQ, ctx)
                subs[x] = combine(S, B, ctx)
        completed.append(subs)
    deep_m = [F0.m_list[1:], F1.m_list[1:]] + [S.m_list for subs in completed for S in subs.values()]
    deep_n = [F0.n_list[1:], F1.n_list[1:]] + [S.n_list for subs in completed for S in subs.values()]
    cm = tuple(max(col) for col in zip(*deep_m)) if r > 1 else ()
    cn = tuple(max(col) for col in zip(*deep_n))
    m1 = 1 + max(F0.m_list[0], F1.m_list[0])
    subs = {}
    for subs_l, tag in zip(completed, (ctx.c0, ctx.c1)):
        for x, S in subs_l.items():
            key = (tag,) + x + (ctx.c0,) * (m1 - 1 - len(x))
            subs[key] = transform(S, ctx, cm, cn)
    return Tree(r, m, (m1,) + cm, (n1,) + cn, base, g1, subs)


def empty_like(T: Tree) -> Tree:
    return Tree(T.r, T.m, T.m_list, T.n_list, frozenset(), {}, {})


# ---------------------------------------------------------------- measure


def extend(T: Tree, cert: Cert, subset, mu, zero, trail=None):
    """Measure of ``subset`` (a subset of ``T.base``) along the fibering.

    ``mu(points, n)`` measures a finite subset of ``C^n``.  When ``trail`` is
    a list, the top-level classes are appended to it as ``(a, Y_a, mu(Y_a))``.
    """
    if T.r == 0:
        img = frozenset(T.g1[w] for w in subset)
        out = mu(img, T.n_list[0])
        if trail is not None:
            trail.append((None, img, out))
        return out
    fib_sub = _fibers({w: T.g1[w] for w in subset})
    fib = _fibers(T.g1)
    classes: dict = {}
    for y, ws in fib_sub.items():
        x, c = cert.choice[y]
        a = extend(T.subs[x], c, frozenset(w + y for w in ws), mu, zero)
        classes.setdefault(a, []).append(y)
    total = zero
    if fib:
        y0 = min(fib, key=_plain_key)
        x0, c0 = cert.choice[y0]
        w0 = min(fib[y0], key=_plain_key)
        for a in sorted(classes, key=lambda v: v.sort_key()):
            ya = frozenset(classes[a])
            ca = extend(T.subs[x0], c0, frozenset(w0 + u for u in ya), mu, zero)
            total = total + a * ca
            if trail is not None:
                trail.append((a, ya, ca))
    return total


def _plain_key(t):
    return tuple((type(e).__name__, e) for e in t)
