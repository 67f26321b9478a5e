"""Validation, restriction and combination for any backend.

The finite backend works on explicit trees; the symbolic backends work on
formulas and decide validity by quantifier elimination.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..errors import (AmbientMismatch, EmptyCombine, ImageEscapesBase, MalformedFibering,
                      MissingDesignatedConstants, NoParameterForFiber, NotASubset, NotInjective,
                      UnsupportedDepth)
from ..logic.sets import DefinableMap, DefinableSet
from ..logic.syntax import (BOT, TOP, Const, Eq, Rel, Var, apply, conj, disj, exists, neg,
                            vars_)
from . import concrete as K
from . import symbolic as S
from .record import Fibering, graph_arity

EXACT_DEPTH = 2
SAMPLES = 8


@dataclass
class ValidationResult:
    """``grade`` is ``"ok"`` or ``"sampled-valid"``; the rest is for reuse."""

    grade: str
    checks: list = field(default_factory=list)
    tree: object = None
    cert: object = None

    def to_json(self) -> dict:
        return {"grade": self.grade, "checks": list(self.checks)}


def _designated(backend):
    cm = backend.sig.const_map
    if "c0" not in cm or "c1" not in cm:
        raise MissingDesignatedConstants("signature lacks c0/c1")
    return Const(cm["c0"]), Const(cm["c1"])


def empty_fibering(backend, r: int, m: int, m_list, n_list) -> Fibering:
    sig = backend.sig
    maps = tuple(DefinableSet(sig, graph_arity(m, m_list, n_list, j), BOT) for j in range(1, r + 2))
    return Fibering(r, m, tuple(m_list), tuple(n_list), DefinableSet(sig, m, BOT), maps)


# -------------------------------------------------------------- validate


def validate(F: Fibering, backend, seed: int | None = None) -> ValidationResult:
    """Check the recursive fibering conditions.

    Symbolic fiberings deeper than ``EXACT_DEPTH`` are only checked at seeded
    sample points of the first image and graded ``"sampled-valid"``; without
    a seed they are refused.
    """
    if not backend.symbolic:
        T = K.from_fibering(F, backend)
        return ValidationResult("ok", ["exhaustive"], T, K.certify(T, K.ctx_for(backend)))
    if F.r > EXACT_DEPTH and seed is None:
        raise UnsupportedDepth(f"{backend.name} decides validity only up to r={EXACT_DEPTH}; "
                               "pass a seed for sampled checking", {"backend": backend.name, "r": F.r})
    checks = _structural(F, backend)
    fib = S.SymFib.of(F)
    base_pred = backend.sig.base_pred
    D = S.set_of(F.base.phi)
    if F.r == 0:
        _check_injective(F, backend)
        checks.append("injective into C")
        return ValidationResult("ok", checks)
    names = S.Names()
    img = S.image(fib, D, names)
    n1 = F.n_list[0]
    y = vars_(1, n1)

    def good(yt, depth=None):
        z = names.take(F.m_list[0])
        sub = fib.sub([Var(v) for v in z])
        Dy = S.product_set(S.fiber(fib, D, yt), img, F.m)
        return exists(z, S.validity(sub, Dy, names, base_pred, depth))

    if F.r <= EXACT_DEPTH:
        w = backend.find_point(conj(img(y), neg(good(y))), n1)
        if w is not None:
            raise NoParameterForFiber("no parameter yields a fibering of this fiber",
                                      {"y": backend.fmt_point(w)})
        checks.append("every fiber has a parameter")
        return ValidationResult("ok", checks)
    w = backend.find_point(conj(img(y), neg(good(y, 1))), n1)
    if w is not None:
        raise NoParameterForFiber("no parameter matches the domain of this fiber",
                                  {"y": backend.fmt_point(w)})
    checks.append("domain condition at depth 2")
    for p in _sample_image(backend, img(y), n1, seed):
        if backend.qe(good([Const(v) for v in p])) != TOP:
            raise NoParameterForFiber("sampled fiber has no parameter", {"y": backend.fmt_point(p)})
    checks.append(f"sampled fibers (seed {seed})")
    return ValidationResult("sampled-valid", checks)


def _sample_image(backend, phi, n: int, seed: int) -> list:
    rng = random.Random(seed)
    pts = []
    first = backend.find_point(phi, n)
    if first is not None:
        pts.append(first)
    tries = 0
    while len(pts) < SAMPLES and tries < 40 * SAMPLES:
        tries += 1
        p = backend.random_point(rng, n)
        if p not in pts and backend.holds(phi, p):
            pts.append(p)
    return pts


def _structural(F: Fibering, backend) -> list:
    for j, g in enumerate(F.maps, start=1):
        n = F.n_list[j - 1]
        backend.validate_map(DefinableMap(g, g.arity - n, n))
    m, n1 = F.m, F.n_list[0]
    outs = [f"_v{i}" for i in range(n1)]
    dom = exists(outs, apply(F.maps[0].phi, vars_(1, m) + [Var(v) for v in outs]))
    for a, b, what in ((dom, F.base.phi, "domain of f1 leaves the base"),
                       (F.base.phi, dom, "base point outside the domain of f1")):
        w = backend.subset_witness(a, b, m)
        if w is not None:
            raise MalformedFibering(what, {"point": backend.fmt_point(w)})
    return ["graphs functional", "domain of f1 is the base"]


def _check_injective(F: Fibering, backend) -> None:
    m, n = F.m, F.n_list[0]
    G = F.maps[0].phi
    two = conj(G, apply(G, vars_(m + n + 1, m) + vars_(m + 1, n)),
               neg(conj(*[Eq(Var(f"x{i}"), Var(f"x{m + n + i}")) for i in range(1, m + 1)])))
    w = backend.find_point(two, 2 * m + n)
    if w is not None:
        raise NotInjective("two points share an image",
                           {"x": backend.fmt_point(w[:m]), "x'": backend.fmt_point(w[m + n:]),
                            "y": backend.fmt_point(w[m:m + n])})
    out_c = conj(*[Rel(backend.sig.base_pred, (Var(f"x{m + i}"),)) for i in range(1, n + 1)])
    w = backend.find_point(conj(G, neg(out_c)), m + n)
    if w is not None:
        raise ImageEscapesBase("image point outside C",
                               {"x": backend.fmt_point(w[:m]), "y": backend.fmt_point(w[m:])})


# -------------------------------------------------------------- restrict


def restrict(F: Fibering, Xp: DefinableSet, backend) -> Fibering:
    if Xp.arity != F.m:
        raise AmbientMismatch(f"restriction target has arity {Xp.arity}, base has {F.m}")
    w = backend.subset_witness(Xp.phi, F.base.phi, F.m)
    if w is not None:
        raise NotASubset("restriction target leaves the base", {"point": backend.fmt_point(w)})
    if not backend.symbolic:
        ctx = K.ctx_for(backend)
        T = K.restrict(K.from_fibering(F, backend), backend.enumerate(Xp.phi, F.m), ctx)
        return K.to_fibering(T, backend, Xp.phi)
    graphs = S.restrict_graphs(S.SymFib.of(F), S.set_of(F.base.phi), S.set_of(Xp.phi),
                               S.Names(), backend.sig.base_pred)
    sig = backend.sig
    maps = tuple(DefinableSet(sig, F.arity(j), backend.qe(g)) for j, g in enumerate(graphs, start=1))
    return Fibering(F.r, F.m, F.m_list, F.n_list, DefinableSet(sig, F.m, backend.qe(Xp.phi)), maps)


# --------------------------------------------------------------- combine


def combine(F0: Fibering, F1: Fibering, backend) -> Fibering:
    """One fibering of the union, with ``F0`` keeping its part of the base."""
    if F0.m != F1.m:
        raise AmbientMismatch(f"ambient arities {F0.m} and {F1.m} differ")
    if F0.r != F1.r:
        raise AmbientMismatch(f"step counts {F0.r} and {F1.r} differ")
    c0, c1 = _designated(backend)
    if not backend.symbolic:
        ctx = K.ctx_for(backend)
        T = K.combine(K.from_fibering(F0, backend), K.from_fibering(F1, backend), ctx)
        K.certify(T, ctx)
        return K.to_fibering(T, backend)
    if F0.r > 0:
        raise UnsupportedDepth(f"symbolic combine is implemented for r=0 only, got r={F0.r}",
                               {"backend": backend.name, "r": F0.r})
    for F in (F0, F1):
        validate(F, backend)
    m = F0.m
    n0, n1 = F0.n_list[0], F1.n_list[0]
    G1 = conj(neg(F0.base.phi), F1.maps[0].phi)
    G, N = S.combine0(F0.maps[0].phi, n0, G1, n1, m, c0, c1)
    sig = backend.sig
    out = Fibering(0, m, (), (N,), DefinableSet(sig, m, backend.qe(disj(F0.base.phi, F1.base.phi))),
                   (DefinableSet(sig, m + N, backend.qe(G)),))
    validate(out, backend)
    return out


def n_ary_combine(fiberings, backend) -> Fibering:
    """Left fold of ``combine``; a single input is combined with an empty one."""
    fiberings = list(fiberings)
    if not fiberings:
        raise EmptyCombine("nothing to combine")
    acc = fiberings[0]
    rest = fiberings[1:] or [empty_fibering(backend, acc.r, acc.m, acc.m_list, acc.n_list)]
    for F in rest:
        acc = combine(acc, F, backend)
    return acc
