"""Oracle and law suites: the engine against independent computations.

Each suite returns a ``SuiteResult``.  Finite structures are checked by
enumeration, semilinear formulas by seeded sampling and by a second cell
ordering.  Everything is deterministic for a fixed seed.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from itertools import combinations
from itertools import product as cartesian

from .discrete import FiniteBackend, FiniteStructure, PureSetBackend
from .engine.assignment import MeasureAssignment, corrupted
from .engine.audit import (check_composition, check_fubini, check_uniqueness, finite_corpus,
                           generate_corpus)
from .engine.corpus import (random_fibering_tree, random_formula, random_linear_bijection,
                            random_map, random_quantified, random_set, random_structure)
from .engine.extend import extend
from .engine.levels import level_sets, mu_f
from .errors import Counterexample
from .fibering import Fibering, combine, n_ary_combine, restrict, validate
from .fibering import concrete as K
from .logic.printer import pretty
from .logic.sets import DefinableSet
from .logic.syntax import Const, Eq, Var, conj, disj, free_vars, neg, vars_
from .semilinear import SemilinearBackend, qe, sample_equiv
from .semiring import COUNT, INT, from_nat, make, one


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failures: list = field(default_factory=list)
    seconds: float = 0.0
    detail: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures and self.cases > 0

    def fail(self, item: dict) -> None:
        if len(self.failures) < 10:
            self.failures.append(item)
        else:
            self.detail["more failures"] = self.detail.get("more failures", 0) + 1

    def to_json(self) -> dict:
        return {"suite": self.name, "status": "pass" if self.ok else "fail", "cases": self.cases,
                "seconds": round(self.seconds, 3), "failures": self.failures, "detail": self.detail}


def _timed(fn):
    def run(*args, **kwargs):
        t = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t
        return res
    run.__name__ = fn.__name__
    run.__doc__ = fn.__doc__
    return run


# ------------------------------------------------------------ finite fiberings


def random_fiberings(seed: int, count: int, max_size: int = 6, max_r: int = 3):
    """``count`` seeded random fiberings ``(backend, F, tree)`` over random structures.

    The step count cycles through ``0..max_r`` so every depth is represented.
    """
    out = []
    i = 0
    while len(out) < count:
        rng = random.Random(f"{seed}:{i}")
        i += 1
        S = random_structure(rng, max_size)
        r = len(out) % (max_r + 1)
        m = rng.randint(1, 2)
        T = random_fibering_tree(S, rng, r, m)
        if T is None:
            continue
        b = FiniteBackend(S)
        out.append((b, K.to_fibering(T, b), T))
    return out


@_timed
def counting_oracle(seed: int = 0, count: int = 200) -> SuiteResult:
    """``extend`` with the counting measure against the size of the base."""
    res = SuiteResult("counting oracle")
    depths = [0] * 4
    for b, F, _ in random_fiberings(seed, count):
        res.cases += 1
        depths[F.r] += 1
        want = len(b.enumerate(F.base.phi, F.m))
        got = extend(F.base, F, MeasureAssignment(b, "count"))
        if got.value != make(COUNT, want):
            res.fail({"fibering": F.to_json(), "extend": str(got.value), "enumerated": want})
    res.detail["by depth"] = depths
    return res


# -------------------------------------------------------------- measure laws


@_timed
def axiom_suite(seed: int = 0, structures=None, instances: int = 500) -> SuiteResult:
    """The measure laws for counting (exhaustive), semilinear dim and E and
    Morley rank (at least ``instances`` checks each)."""
    res = SuiteResult("measure laws")
    structures = list(structures or []) + [random_structure(random.Random(f"{seed}:s{i}"), 4)
                                           for i in range(6)]
    finite, exhaustive = 0, True
    for S in structures:
        b = FiniteBackend(S)
        mu = MeasureAssignment(b, "count")
        corpus = finite_corpus(b)
        exhaustive = exhaustive and corpus["exhaustive"]
        rep = check_fubini(mu, corpus, seed)
        finite += sum(r.checked for r in rep.results)
        res.cases += 1
        if not rep.ok:
            res.fail({"structure": S.to_json(), "report": rep.to_json()})
    res.detail["COUNTING"] = finite
    res.detail["COUNTING exhaustive"] = exhaustive
    plans = [(SemilinearBackend(), "euler"), (SemilinearBackend(), "dim"), (PureSetBackend(), "morley")]
    for b, kind in plans:
        mu = MeasureAssignment(b, kind)
        done, k = 0, 0
        while done < instances:
            arity = 3 if b.name == "pureset" else 2
            rep = check_fubini(mu, generate_corpus(mu, seed * 1000 + k, sets=40, maps=20,
                                                   max_arity=arity), seed + k)
            k += 1
            done += sum(r.checked for r in rep.results)
            res.cases += 1
            if not rep.ok:
                res.fail({"measure": mu.name, "report": rep.to_json()})
        res.detail[mu.name] = done
    return res


@_timed
def squaring_suite() -> SuiteResult:
    """Profile identities for the Euler rules on a strongly minimal set."""
    from .engine.audit import squaring_instances

    res = SuiteResult("uniqueness profiles")
    b = PureSetBackend()
    mu = MeasureAssignment(b, "pure_euler")
    line = b.base_atom(1)
    k = mu.measure(line, 1)
    res.cases += 1
    res.detail["mu(k)"] = k.payload
    if k != one(INT):
        res.fail({"mu(k)": str(k), "expected": 1})
    # finite d-sets measure d, their complements 1 - d
    names = sorted(b.sig.const_map)
    for d in range(len(names) + 1):
        pts = disj(*[Eq(Var("x1"), Const(b.sig.const_map[c])) for c in names[:d]])
        for phi, want in ((pts, d), (conj(line, neg(pts)), 1 - d)):
            res.cases += 1
            got = mu.measure(phi, 1)
            if got != make(INT, want):
                res.fail({"set": pretty(phi), "E": got.payload, "expected": want})
    for r in squaring_instances(mu):
        res.cases += 1
        if not r.ok:
            res.fail(r.to_json())
    # the identity itself, read with mu(k) = 1 and mu({0}) = 1
    res.cases += 1
    lhs, rhs = k, one(INT) + from_nat(2, INT) * (k + make(INT, -1))
    res.detail["identity"] = f"{lhs.payload} = 1 + 2*({k.payload} - 1)"
    if lhs != rhs:
        res.fail({"identity": res.detail["identity"], "rhs": rhs.payload})
    return res


# ---------------------------------------------------------------- identities


@_timed
def identity_suite(seed: int = 0, symbolic_cases: int = 200) -> SuiteResult:
    """Disjoint-domain additivity, the fiber sum, composition closure, witness
    independence and uniqueness by projection."""
    res = SuiteResult("identities")
    for name, fn in (("additivity", _check_additivity), ("fiber sum", _check_fiber_sum),
                     ("composition", _check_composition), ("witness independence", _check_witness),
                     ("uniqueness", _check_uniqueness)):
        sub = fn(seed, symbolic_cases)
        res.cases += sub.cases
        res.detail[name] = {"cases": sub.cases, "failures": len(sub.failures), **sub.detail}
        for f in sub.failures:
            res.fail({"identity": name, **f})
    return res


def _subsets(points):
    pts = sorted(points, key=repr)
    for k in range(len(pts) + 1):
        yield from combinations(pts, k)


def _check_additivity(seed, n_sym):
    res = SuiteResult("additivity")
    # engine level: every split of the base of a finite fibering
    for b, F, T in random_fiberings(seed + 1, 40):
        mu = MeasureAssignment(b, "count")
        whole = extend(F.base, F, mu).value
        X = list(T.base)
        for part in _subsets(X):
            if len(X) > 5 and len(part) not in (1, len(X) // 2):
                continue
            A = DefinableSet(b.sig, F.m, b.tab(part, F.m))
            Bs = DefinableSet(b.sig, F.m, b.tab([x for x in X if x not in part], F.m))
            FA, FB = restrict(F, A, b), restrict(F, Bs, b)
            got = extend(FA.base, FA, mu).value + extend(FB.base, FB, mu).value
            res.cases += 1
            if got != whole:
                res.fail({"fibering": F.to_json(), "part": [list(p) for p in part],
                          "sum": str(got), "whole": str(whole)})
    # weighted sums along symbolic maps
    rng = random.Random(seed)
    b = SemilinearBackend()
    for i in range(n_sym):
        mu = MeasureAssignment(b, ("euler", "dim")[i % 2])
        m = rng.randint(1, 2)
        f = random_map(b, m, rng.randint(1, m), rng)
        S = random_set(b, m, rng).phi
        whole = mu_f(f.domain(), f, mu)
        parts = mu_f(DefinableSet(b.sig, m, S), f, mu) + mu_f(DefinableSet(b.sig, m, neg(S)), f, mu)
        res.cases += 1
        res.detail["symbolic"] = res.detail.get("symbolic", 0) + 1
        if whole != parts:
            res.fail({"map": pretty(f.graph.phi), "split": pretty(S), "whole": str(whole),
                      "parts": str(parts)})
    return res


def _check_fiber_sum(seed, n_sym):
    res = SuiteResult("fiber sum")
    for i in range(8):
        S = random_structure(random.Random(f"{seed}:f{i}"), 4)
        b = FiniteBackend(S)
        mu = MeasureAssignment(b, "count")
        for f in finite_corpus(b)["maps"]:
            res.cases += 1
            lhs, rhs = mu.measure(f.domain().phi, 1), level_sets(f, mu).total
            if lhs != rhs:
                res.fail({"map": pretty(f.graph.phi), "mu(X)": str(lhs), "sum": str(rhs)})
    rng = random.Random(seed + 7)
    plans = [(SemilinearBackend(), "euler"), (SemilinearBackend(), "dim"), (PureSetBackend(), "morley"),
             (PureSetBackend(), "pure_euler")]
    for i in range(n_sym):
        b, kind = plans[i % len(plans)]
        mu = MeasureAssignment(b, kind)
        m = rng.randint(1, 2)
        f = random_map(b, m, rng.randint(1, m), rng)
        res.cases += 1
        res.detail["symbolic"] = res.detail.get("symbolic", 0) + 1
        lhs, rhs = mu.measure(f.domain().phi, m), level_sets(f, mu).total
        if lhs != rhs:
            res.fail({"measure": mu.name, "map": pretty(f.graph.phi), "mu(X)": str(lhs), "sum": str(rhs)})
    return res


def _check_composition(seed, n_sym):
    res = SuiteResult("composition")
    for i in range(4):
        S = random_structure(random.Random(f"{seed}:c{i}"), 4)
        S = FiniteStructure(S.universe, S.base[:3], S.base[0], S.base[1], S.relations, S.name)
        b = FiniteBackend(S)
        mu = MeasureAssignment(b, "count")
        maps = finite_corpus(b)["maps"]
        for f in maps:
            for g in maps:
                r = check_composition(f, g, mu)
                res.cases += 1
                if not r.ok:
                    res.fail({"f": pretty(f.graph.phi), "g": pretty(g.graph.phi), "witness": r.counterexample})
    return res


def _check_witness(seed, n_sym):
    res = SuiteResult("witness independence")
    # finite: a second random fibering of the same base, and restrict-then-recombine
    for b, F, T in random_fiberings(seed + 2, 60):
        mu = MeasureAssignment(b, "count")
        a = extend(F.base, F, mu).value
        rng = random.Random(f"{seed}:w{len(res.failures)}:{res.cases}")
        for _ in range(20):
            T2 = random_fibering_tree(b.S, rng, rng.randint(0, 3), F.m, base=T.base)
            if T2 is not None:
                G = K.to_fibering(T2, b, F.base.phi)
                res.cases += 1
                c = extend(G.base, G, mu).value
                if a != c:
                    res.fail({"first": F.to_json(), "second": G.to_json(), "values": [str(a), str(c)]})
                break
        X = sorted(T.base, key=repr)
        part = X[: len(X) // 2]
        A = DefinableSet(b.sig, F.m, b.tab(part, F.m))
        Bs = DefinableSet(b.sig, F.m, b.tab(X[len(X) // 2:], F.m))
        H = combine(restrict(F, A, b), restrict(F, Bs, b), b)
        res.cases += 1
        c = extend(H.base, H, mu).value
        if a != c:
            res.fail({"first": F.to_json(), "recombined": H.to_json(), "values": [str(a), str(c)]})
    # symbolic: identity against an invertible linear map and a glued mixture
    rng = random.Random(seed + 3)
    b = SemilinearBackend()
    for i in range(n_sym):
        mu = MeasureAssignment(b, ("euler", "dim")[i % 2])
        m = rng.randint(1, 2)
        X = random_set(b, m, rng)
        ident = _r0(b, X, vars_(1, m))
        lin_map = _r0(b, X, random_linear_bijection(rng, m))
        values = [extend(X, F, mu).value for F in (ident, lin_map)]
        if m == 1:
            S = random_set(b, m, rng).phi
            mixed = combine(restrict(ident, DefinableSet(b.sig, m, conj(X.phi, S)), b),
                            restrict(lin_map, DefinableSet(b.sig, m, conj(X.phi, neg(S))), b), b)
            values.append(extend(mixed.base, mixed, mu).value)
        values.append(mu.measure(X.phi, m))
        res.cases += 1
        res.detail["symbolic"] = res.detail.get("symbolic", 0) + 1
        if len(set(values)) != 1:
            res.fail({"set": pretty(X.phi), "measure": mu.name, "values": [str(v) for v in values]})
    return res


def _r0(b, X: DefinableSet, terms) -> Fibering:
    m = X.arity
    G = conj(X.phi, *[Eq(Var(f"x{m + i + 1}"), t) for i, t in enumerate(terms)])
    return Fibering(0, m, (), (len(terms),), X, (DefinableSet(b.sig, m + len(terms), G),))


def _check_uniqueness(seed, n_sym):
    res = SuiteResult("uniqueness")
    sl, ps = SemilinearBackend(), PureSetBackend()
    per = max(1, n_sym // 4)
    for b, kind in ((sl, "euler"), (sl, "dim"), (ps, "morley"), (ps, "pure_euler")):
        mu = MeasureAssignment(b, kind)
        r = check_uniqueness(mu, mu, max_arity=2, seed=seed, samples=per)
        res.cases += r.checked
        res.detail["symbolic"] = res.detail.get("symbolic", 0) + r.checked
        if not r.ok:
            res.fail({"measure": mu.name, "witness": r.counterexample})
        bad = corrupted(mu, _off_on_points(b), "shifted on finite sets")
        r = check_uniqueness(mu, bad, max_arity=2, seed=seed, samples=per)
        res.cases += 1
        if r.ok or r.counterexample.get("arity") != 1:
            res.fail({"measure": mu.name, "expected": "arity-1 counterexample",
                      "got": r.counterexample})
    # counting on isomorphic copies
    for i in range(20):
        S = random_structure(random.Random(f"{seed}:u{i}"), 5)
        T = _relabel(S, random.Random(i))
        for n in (1, 2):
            pts = list(cartesian(S.base, repeat=n))
            for part in _subsets(pts) if len(pts) <= 9 else [pts[: len(pts) // 2]]:
                res.cases += 1
                a = MeasureAssignment(FiniteBackend(S), "count").measure(FiniteBackend(S).tab(part, n), n)
                image = [tuple(T[1][e] for e in p) for p in part]
                c = MeasureAssignment(FiniteBackend(T[0]), "count").measure(FiniteBackend(T[0]).tab(image, n), n)
                if a != c:
                    res.fail({"structure": S.to_json(), "set": [list(p) for p in part]})
    return res


def _off_on_points(b):
    """Add one to the value of every nonempty finite set, leaving the rest."""
    def adjust(mu, phi, arity, v):
        if arity == 1 and v == one(v.id) and b.find_point(phi, arity) is not None:
            return v + one(v.id) if v.id.tag != "TROP" else make(v.id, 1)
        return v
    return adjust


def _relabel(S: FiniteStructure, rng):
    new = list(range(100, 100 + len(S.universe)))
    rng.shuffle(new)
    f = dict(zip(S.universe, new))
    rels = tuple((n, frozenset(tuple(f[e] for e in row) for row in rows)) for n, rows in S.relations)
    T = FiniteStructure(tuple(f[e] for e in S.universe), tuple(f[e] for e in S.base), f[S.c0],
                        f[S.c1], rels, S.name + "'")
    return T, f


# ------------------------------------------------------------------ formulas


@_timed
def qe_soundness(seed: int = 0, formulas: int = 100, points: int = 10_000) -> SuiteResult:
    """Quantified formulas against their eliminated forms on sampled points."""
    res = SuiteResult("qe soundness")
    b = SemilinearBackend()
    rng = random.Random(seed)
    sizes = []
    for i in range(formulas):
        phi, free = random_quantified(b, rng, nvars=rng.randint(2, 4), blocks=3)
        while not free_vars(phi):
            phi, free = random_quantified(b, rng, nvars=rng.randint(2, 4), blocks=3)
        out = qe(phi)
        res.cases += 1
        sizes.append(len(pretty(out)))
        try:
            rep = sample_equiv(phi, out, points, seed + i)
        except Counterexample as e:
            res.fail({"formula": pretty(phi), "qe": pretty(out), "point": e.witness})
            continue
        res.detail["points"] = res.detail.get("points", 0) + rep.trials
    res.detail["max output size"] = max(sizes, default=0)
    return res


@_timed
def euler_invariance(seed: int = 0, formulas: int = 200) -> SuiteResult:
    """E and dim from the ``x1..xn`` and the reversed cell orderings, and from
    the measure entry point, which first solves out fixed coordinates."""
    res = SuiteResult("euler invariance")
    b = SemilinearBackend()
    rng = random.Random(seed)
    for i in range(formulas):
        n = rng.randint(1, 3)
        phi = random_formula(b, n, rng, size=rng.randint(1, 5))
        d1, d2 = b.decompose(phi, n), b.decompose(phi, n, reverse=True)
        e1, e2 = (sum((-1) ** c.dim for c in d.cells) for d in (d1, d2))
        dim1, dim2 = (max((c.dim for c in d.cells), default=None) for d in (d1, d2))
        e3 = b.measure("euler", phi, n).payload
        dim3 = b.measure("dim", phi, n).payload
        res.cases += 1
        if not (e1 == e2 == e3) or not (dim1 == dim2 == _dim(dim3)):
            res.fail({"formula": pretty(phi), "forward": [e1, dim1], "reversed": [e2, dim2],
                      "measure": [e3, str(dim3)]})
    return res


def _dim(payload):
    return payload if isinstance(payload, int) else None


# ------------------------------------------------------------ fibering calculus


@_timed
def calculus_suite(seed: int = 0, count: int = 60) -> SuiteResult:
    """Restriction and combination keep fiberings valid and measure sets exactly."""
    res = SuiteResult("fibering calculus")
    for b, F, T in random_fiberings(seed + 4, count):
        mu = MeasureAssignment(b, "count")
        X = sorted(T.base, key=repr)
        for part in _subsets(X):
            rest = [x for x in X if x not in part]
            A = DefinableSet(b.sig, F.m, b.tab(part, F.m))
            Bs = DefinableSet(b.sig, F.m, b.tab(rest, F.m))
            FA, FB = restrict(F, A, b), restrict(F, Bs, b)
            H = combine(FA, FB, b)
            res.cases += 1
            for name, G, want in (("restrict", FA, len(part)), ("complement", FB, len(rest)),
                                  ("recombine", H, len(X))):
                if validate(G, b).grade != "ok":
                    res.fail({"fibering": F.to_json(), "step": name, "grade": validate(G, b).grade})
                got = extend(G.base, G, mu).value
                if got != make(COUNT, want):
                    res.fail({"fibering": F.to_json(), "step": name, "part": [list(p) for p in part],
                              "extend": str(got), "expected": want})
    # n-ary: up to four fiberings of one structure, same depth and ambient arity
    rng = random.Random(seed + 5)
    for i in range(count):
        S = random_structure(rng, 6)
        b = FiniteBackend(S)
        r, m, N = rng.randint(0, 3), rng.randint(1, 2), rng.randint(1, 4)
        trees = []
        for _ in range(40):
            T = random_fibering_tree(S, rng, r, m)
            if T is not None:
                trees.append(T)
            if len(trees) == N:
                break
        if len(trees) < N:
            continue
        Fs = [K.to_fibering(T, b) for T in trees]
        H = n_ary_combine(Fs, b)
        union = set().union(*(T.base for T in trees))
        got = extend(H.base, H, MeasureAssignment(b, "count")).value
        res.cases += 1
        if got != make(COUNT, len(union)):
            res.fail({"n": N, "fiberings": [F.to_json() for F in Fs], "extend": str(got),
                      "union": len(union)})
    return res


SUITES = {"counting": counting_oracle, "axioms": axiom_suite, "identities": identity_suite,
          "squaring": squaring_suite, "qe": qe_soundness, "euler": euler_invariance,
          "calculus": calculus_suite}
