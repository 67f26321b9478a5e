"""Checks of the measure laws, of Fubini maps, and of uniqueness."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from itertools import product as cartesian

from ..errors import TooManyValues
from ..logic.printer import pretty
from ..logic.sets import DefinableMap, DefinableSet
from ..logic.syntax import BOT, Const, Eq, Var, apply, conj, disj, exists, neg, shift, vars_
from ..semiring import MismatchedSemiring, from_nat, one, zero
from .corpus import compose, random_map, random_set
from .extend import extend
from .levels import level_sets, mu_f


@dataclass
class CheckResult:
    name: str
    ok: bool = True
    checked: int = 0
    counterexample: dict | None = None

    def fail(self, witness: dict) -> None:
        if self.ok:
            self.ok = False
            self.counterexample = witness

    def to_json(self) -> dict:
        out = {"check": self.name, "status": "pass" if self.ok else "fail", "checked": self.checked}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


@dataclass
class AuditReport:
    measure: str
    results: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def get(self, name: str) -> CheckResult:
        return next(r for r in self.results if r.name == name)

    def to_json(self) -> dict:
        return {"measure": self.measure, "ok": self.ok, "results": [r.to_json() for r in self.results]}


def _s(v) -> str:
    return str(v)


# ------------------------------------------------------------- corpus


def generate_corpus(mu, seed: int, sets: int = 20, maps: int = 20, max_arity: int = 2) -> dict:
    """Seeded sets (with arities) and maps for ``check_fubini``."""
    rng = random.Random(seed)
    b = mu.backend
    out_sets = [random_set(b, rng.randint(1, max_arity), rng) for _ in range(sets)]
    out_maps = []
    for _ in range(maps):
        m = rng.randint(1, max_arity)
        out_maps.append(random_map(b, m, rng.randint(1, m), rng))
    return {"sets": out_sets, "maps": out_maps}


def finite_corpus(backend, max_points: int = 4, max_maps: int = 1024, seed: int = 0) -> dict:
    """Every subset of ``C`` and of each ``C^n`` with at most ``max_points`` points, every
    partial map ``C -> C`` when there are at most ``max_maps`` of them (a seeded
    sample otherwise).  ``exhaustive`` records which case applied."""
    S = backend.S
    sets = []
    n = 1
    while n == 1 or len(S.base) ** n <= max_points:
        pts = list(cartesian(S.base, repeat=n))
        for mask in range(1 << len(pts)):
            sets.append(backend.definable(backend.tab([p for i, p in enumerate(pts) if mask >> i & 1], n), n))
        n += 1
    choices = [None] + list(S.base)
    exhaustive = len(choices) ** len(S.base) <= max_maps
    if exhaustive:
        picks = list(cartesian(choices, repeat=len(S.base)))
    else:
        rng = random.Random(seed)
        picks = [tuple(rng.choice(choices) for _ in S.base) for _ in range(max_maps)]
    maps = []
    for choice in picks:
        rows = [(x, y) for x, y in zip(S.base, choice) if y is not None]
        maps.append(DefinableMap(DefinableSet(backend.sig, 2, backend.tab(rows, 2)), 1, 1))
    return {"sets": sets, "maps": maps, "all_pairs": True, "exhaustive": exhaustive}


# ------------------------------------------------------------- axioms


NAMES = ("normalization", "additivity", "finite fiber values", "definable level sets",
         "constant fiber law", "fiber sum", "product law", "inclusion-exclusion",
         "additivity of weighted sums")


def check_fubini(mu, corpus: dict, seed: int = 0) -> AuditReport:
    """Run every law on the corpus; failures are entries, never exceptions."""
    rng = random.Random(seed)
    b = mu.backend
    res = {n: CheckResult(n) for n in NAMES}
    sets, maps = corpus.get("sets", []), corpus.get("maps", [])
    by_arity: dict = {}
    for X in sets:
        by_arity.setdefault(X.arity, []).append(X)
    _normalization(mu, sets, res["normalization"])
    every = corpus.get("all_pairs", False)
    for X in sets:
        same = by_arity[X.arity]
        for Y in same if every else rng.sample(same, min(2, len(same))):
            _pairwise(mu, X, Y, res["additivity"], res["inclusion-exclusion"])
        for Z in by_arity.get(1, []) if every else [rng.choice(sets)]:
            _product(mu, X, Z, res["product law"])
    for f in maps:
        _map_laws(mu, f, res, rng)
    report = AuditReport(mu.name, [res[n] for n in NAMES])
    if b.name == "pureset":
        report.results.extend(squaring_instances(mu))
    return report


def _normalization(mu, sets, r: CheckResult) -> None:
    b = mu.backend
    for n in sorted({X.arity for X in sets} | {1}):
        r.checked += 1
        v = mu.measure(BOT, n)
        if v != zero(mu.semiring):
            r.fail({"set": "empty", "arity": n, "value": _s(v)})
    for X in sets:
        p = b.find_point(X.phi, X.arity)
        if p is None:
            continue
        r.checked += 1
        single = conj(*[Eq(Var(f"x{i}"), Const(c)) for i, c in enumerate(p, start=1)])
        v = mu.measure(single, X.arity)
        if v != one(mu.semiring):
            r.fail({"set": "singleton", "point": b.fmt_point(p), "value": _s(v)})


def _pairwise(mu, X, Y, add: CheckResult, incl: CheckResult) -> None:
    n = X.arity
    mX, mY = mu.measure(X.phi, n), mu.measure(Y.phi, n)
    inter, diff = mu.measure(conj(X.phi, Y.phi), n), mu.measure(conj(X.phi, neg(Y.phi)), n)
    add.checked += 1
    if inter + diff != mX:
        add.fail({"X": pretty(X.phi), "split by": pretty(Y.phi), "mu(X)": _s(mX),
                  "parts": [_s(inter), _s(diff)]})
    union = mu.measure(disj(X.phi, Y.phi), n)
    incl.checked += 1
    if union + inter != mX + mY:
        incl.fail({"X": pretty(X.phi), "Y": pretty(Y.phi), "union": _s(union), "meet": _s(inter),
                   "mu(X)": _s(mX), "mu(Y)": _s(mY)})


def _product(mu, X, Z, r: CheckResult) -> None:
    m, n = X.arity, Z.arity
    P = conj(X.phi, shift(Z.phi, m))
    r.checked += 1
    lhs = mu.measure(P, m + n)
    rhs = mu.measure(X.phi, m) * mu.measure(Z.phi, n)
    if lhs != rhs:
        r.fail({"X": pretty(X.phi), "Y": pretty(Z.phi), "mu(XxY)": _s(lhs), "mu(X)mu(Y)": _s(rhs)})


def _map_laws(mu, f: DefinableMap, res: dict, rng) -> None:
    b = mu.backend
    m, n = f.dom_arity, f.cod_arity
    dom = _domain(f)
    try:
        rep = level_sets(f, mu)
    except TooManyValues as e:
        res["finite fiber values"].checked += 1
        res["finite fiber values"].fail({"map": pretty(f.graph.phi), "error": str(e)})
        return
    res["finite fiber values"].checked += 1
    img = _image(f)
    # level sets partition the image and carry the right fiber values
    r = res["definable level sets"]
    r.checked += 1
    union = BOT
    for i, (a, Y, _) in enumerate(rep.classes):
        for a2, Y2, _ in rep.classes[i + 1:]:
            w = b.find_point(conj(Y.phi, Y2.phi), n)
            if w is not None:
                r.fail({"map": pretty(f.graph.phi), "overlap at": b.fmt_point(w)})
        union = disj(union, Y.phi)
        y = b.find_point(Y.phi, n)
        fiber = apply(f.graph.phi, vars_(1, m) + [Const(c) for c in y])
        got = mu.measure(fiber, m)
        if got != a:
            r.fail({"map": pretty(f.graph.phi), "y": b.fmt_point(y), "class value": _s(a),
                    "fiber measure": _s(got)})
    if not b.equivalent(union, img, n):
        r.fail({"map": pretty(f.graph.phi), "problem": "classes do not cover the image"})
    # constant fiber law on each class, and the fiber sum over all classes
    c = res["constant fiber law"]
    for a, Y, v in rep.classes:
        c.checked += 1
        pre = conj(f.graph.phi, shift(Y.phi, m))
        Xa = exists([f"_o{j}" for j in range(n)], apply(pre, vars_(1, m) + [Var(f"_o{j}") for j in range(n)]))
        lhs = mu.measure(Xa, m)
        if lhs != a * v:
            c.fail({"map": pretty(f.graph.phi), "class": pretty(Y.phi), "a": _s(a),
                    "mu(preimage)": _s(lhs), "a*mu(Y_a)": _s(a * v)})
    s = res["fiber sum"]
    s.checked += 1
    total = mu.measure(dom, m)
    if total != rep.total:
        s.fail({"map": pretty(f.graph.phi), "mu(X)": _s(total), "sum": _s(rep.total)})
    # weighted sums add over a split of the domain
    w = res["additivity of weighted sums"]
    w.checked += 1
    Sx = random_set(b, m, rng).phi
    # the graph already confines points to the domain
    X1 = DefinableSet(f.sig, m, Sx)
    X2 = DefinableSet(f.sig, m, neg(Sx))
    whole = rep.total
    parts = mu_f(X1, f, mu) + mu_f(X2, f, mu)
    if whole != parts:
        w.fail({"map": pretty(f.graph.phi), "split": pretty(Sx), "whole": _s(whole), "parts": _s(parts)})


def _domain(f: DefinableMap):
    m, n = f.dom_arity, f.cod_arity
    outs = [f"_o{j}" for j in range(n)]
    return exists(outs, apply(f.graph.phi, vars_(1, m) + [Var(v) for v in outs]))


def _image(f: DefinableMap):
    m, n = f.dom_arity, f.cod_arity
    ins = [f"_i{j}" for j in range(m)]
    return exists(ins, apply(f.graph.phi, [Var(v) for v in ins] + vars_(1, n)))


# ------------------------------------------------------ uniqueness identities


def squaring_instances(mu) -> list:
    """Identities forced on a measure of a strongly minimal field-like set.

    The squaring map has fibers of size 1 over 0 and 2 elsewhere, so
    ``mu(k) = mu({0}) + 2 mu(k - {0})``; cubing gives the version with 3.
    A map with all fibers of size p that is also a bijection forces
    ``mu(k) = p mu(k)``, which fails for an integer measure with ``mu(k) = 1``.
    """
    b = mu.backend
    c0 = Const(b.sig.c0)
    line = b.base_atom(1)
    k = mu.measure(line, 1)
    pt = mu.measure(conj(line, Eq(Var("x1"), c0)), 1)
    rest = mu.measure(conj(line, neg(Eq(Var("x1"), c0))), 1)
    out = []
    for d, name in ((2, "squaring profile"), (3, "cubing profile")):
        r = CheckResult(name, checked=1)
        rhs = pt + from_nat(d, mu.semiring) * rest
        if k != rhs:
            r.fail({"mu(k)": _s(k), "profile sum": _s(rhs)})
        out.append(r)
    if mu.semiring.tag == "INT":
        r = CheckResult("no measure in positive characteristic", checked=3)
        for p in (2, 3, 5):
            if k == from_nat(p, mu.semiring) * k:
                r.fail({"p": p, "mu(k)": _s(k)})
        out.append(r)
    return out


# ------------------------------------------------------------ Fubini maps


def check_fubini_map(f: DefinableMap, mu, restrictions=None, seed: int = 0, samples: int = 64) -> CheckResult:
    """The constant-fiber law for ``f`` restricted to subsets ``X'`` of its domain.

    For a given ``X'`` the only ``Y'`` on which the fiber measure can be
    constant with a nonzero value is a level set of ``f|X'``, so the law is
    checked on every level set.  Finite domains with at most 8 points are
    checked on all subsets; otherwise ``restrictions`` or seeded random sets.
    """
    b = mu.backend
    m, n = f.dom_arity, f.cod_arity
    dom = _domain(f)
    r = CheckResult("fubini map")
    if not b.symbolic and restrictions is None:
        return _fubini_map_finite(f, mu, r, seed, samples)
    if restrictions is None:
        restrictions = _restrictions(b, dom, m, seed, samples)
    for Xp in [dom] + list(restrictions):
        G = conj(f.graph.phi, Xp)
        g = DefinableMap(DefinableSet(f.sig, m + n, G), m, n)
        rep = level_sets(g, mu)
        for a, Y, v in rep.classes:
            r.checked += 1
            pre = exists([f"_o{j}" for j in range(n)],
                         apply(conj(G, shift(Y.phi, m)), vars_(1, m) + [Var(f"_o{j}") for j in range(n)]))
            lhs = mu.measure(pre, m)
            if lhs != a * v:
                r.fail({"X'": pretty(b.qe(pre)), "Y'": pretty(Y.phi), "a": _s(a),
                        "mu(X')": _s(lhs), "a*mu(Y')": _s(a * v)})
                return r
    return r


def _fubini_map_finite(f: DefinableMap, mu, r: CheckResult, seed: int, samples: int) -> CheckResult:
    """Same law with fibers grouped from the enumerated graph."""
    b = mu.backend
    m, n = f.dom_arity, f.cod_arity
    graph = b.enumerate(f.graph.phi, m + n)
    xs = sorted({p[:m] for p in graph}, key=b.S.row_key)
    if len(xs) <= 8:
        subsets = [set(c) for k in range(len(xs) + 1) for c in combinations(xs, k)]
    else:
        rng = random.Random(seed)
        subsets = [set(xs)] + [{x for x in xs if rng.random() < 0.5} for _ in range(samples)]
    for sub in subsets:
        fibers: dict = {}
        for p in graph:
            if p[:m] in sub:
                fibers.setdefault(p[m:], []).append(p[:m])
        levels: dict = {}
        for y, pre in fibers.items():
            levels.setdefault(mu.measure(b.tab(pre, m), m), []).append(y)
        for a, ys in levels.items():
            r.checked += 1
            pre = [x for y in ys for x in fibers[y]]
            lhs, v = mu.measure(b.tab(pre, m), m), mu.measure(b.tab(ys, n), n)
            if lhs != a * v:
                r.fail({"X'": b.fmt_point(pre), "Y'": b.fmt_point(ys), "a": _s(a),
                        "mu(X')": _s(lhs), "a*mu(Y')": _s(a * v)})
                return r
    return r


def _restrictions(b, dom, m: int, seed: int, samples: int) -> list:
    rng = random.Random(seed)
    if not b.symbolic:
        pts = b.enumerate(dom, m)
        if len(pts) <= 8:
            return [b.tab(list(c), m) for k in range(len(pts) + 1) for c in combinations(pts, k)]
        return [b.tab([p for p in pts if rng.random() < 0.5], m) for _ in range(samples)]
    return [random_set(b, m, rng).phi for _ in range(samples)]


def check_composition(f: DefinableMap, g: DefinableMap, mu, seed: int = 0, samples: int = 16) -> CheckResult:
    """``g o f`` is a Fubini map when ``f`` and ``g`` are."""
    r = CheckResult("composition closure")
    for h in (f, g):
        sub = check_fubini_map(h, mu, seed=seed, samples=samples)
        r.checked += sub.checked
        if not sub.ok:
            r.fail({"premise failed": sub.counterexample})
            return r
    sub = check_fubini_map(compose(f, g), mu, seed=seed, samples=samples)
    r.checked += sub.checked
    if not sub.ok:
        r.fail(sub.counterexample)
    return r


# ------------------------------------------------------ witness independence


def check_witness_independence(X, F, G, mu, seed: int | None = None) -> CheckResult:
    r = CheckResult("witness independence", checked=1)
    a = extend(X, F, mu, seed)
    c = extend(X, G, mu, seed)
    if a.value != c.value:
        r.fail({"first": _s(a.value), "second": _s(c.value)})
    return r


# ------------------------------------------------------------ uniqueness


def projection_value(mu, phi, arity: int):
    """``mu`` of ``{x : phi}`` computed from arity-1 values by projecting away coordinates.

    Projection to the first ``arity - 1`` coordinates has arity-1 fibers;
    their values are taken from ``mu`` and the level sets are measured
    recursively the same way.
    """
    b = mu.backend
    if arity <= 1:
        return mu.measure(phi, arity)
    total = zero(mu.semiring)
    for cls, a in mu.param_classes(phi, arity - 1, 1):
        ya = b.qe(conj(cls, exists(["_p"], apply(phi, vars_(1, arity - 1) + [Var("_p")]))))
        if b.find_point(ya, arity - 1) is None:
            continue
        total = total + a * projection_value(mu, ya, arity - 1)
    return total


def check_uniqueness(mu, nu, max_arity: int = 2, corpus=None, seed: int = 0, samples: int = 20) -> CheckResult:
    """Agreement of two measures, arity by arity, lowest arity first."""
    if mu.semiring != nu.semiring:
        raise MismatchedSemiring(f"{mu.name} takes values in {mu.semiring}, {nu.name} in {nu.semiring}")
    if mu.backend is not nu.backend:
        raise MismatchedSemiring("measures live on different backends")
    rng = random.Random(seed)
    b = mu.backend
    r = CheckResult("uniqueness by projection")
    for n in range(1, max_arity + 1):
        items = [X.phi for X in (corpus or {}).get(n, [])] or \
            [random_set(b, n, rng).phi for _ in range(samples)]
        if n == 1:
            items = [Eq(Var("x1"), Var("x1")), BOT] + items
        for phi in items:
            r.checked += 1
            u, v = mu.measure(phi, n), nu.measure(phi, n)
            if u != v:
                r.fail({"arity": n, "set": pretty(phi), "mu": _s(u), "nu": _s(v)})
                return r
            if n > 1:
                pu = projection_value(mu, phi, n)
                if pu != u:
                    r.fail({"arity": n, "set": pretty(phi), "direct": _s(u), "by projection": _s(pu)})
                    return r
    return r
