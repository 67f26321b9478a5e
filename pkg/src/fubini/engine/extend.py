"""Measure of a fibered set by recursion along its fibering.

For ``r >= 1`` the image points are grouped by the measure ``a`` of their
fiber and the total is ``sum_a a * mu(Y_a)``.  A fiber ``f1^-1(y)`` is
measured through the sub-fibering chosen for ``y``, as the piece
``f1^-1(y) x {y}`` of the set it fibers; ``Y_a`` is measured through one
fixed sub-fibering, as ``{w0} x Y_a``.  Symbolic backends carry the free
choices as parameters and return classes of parameter values.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import AmbientMismatch, InvalidFibering
from ..fibering import concrete as K
from ..fibering import symbolic as S
from ..fibering.ops import validate
from ..logic.printer import pretty
from ..logic.syntax import (TOP, Bot, Const, Eq, Var, apply, conj, disj, exists, neg,
                            substitute)
from ..semiring import json_payload, one, zero


@dataclass
class MeasureReport:
    value: object
    grade: str
    levels: list = field(default_factory=list)
    trace: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {"value": json_payload(self.value), "semiring": str(self.value.id), "grade": self.grade,
                "levels": [{"a": json_payload(a), "class": c, "mu": json_payload(v)}
                           for a, c, v in self.levels],
                "trace": list(self.trace)}


def extend(X, F, mu, seed: int | None = None) -> MeasureReport:
    """``mu`` of ``X`` along the fibering ``F`` of ``X``."""
    b = mu.backend
    if X is not None:
        if X.arity != F.m:
            raise AmbientMismatch(f"set has arity {X.arity}, fibering has {F.m}")
        for p, q in ((X.phi, F.base.phi), (F.base.phi, X.phi)):
            w = b.subset_witness(p, q, F.m)
            if w is not None:
                raise InvalidFibering("the set is not the fibered base", {"point": b.fmt_point(w)})
    if isinstance(F.base.phi, Bot):
        return MeasureReport(zero(mu.semiring), "exact", [], [{"empty base": True}])
    res = validate(F, b, seed)
    grade = "exact" if res.grade == "ok" else "sampled"
    trace = [{"validate": res.grade, "checks": res.checks}]
    if not b.symbolic:
        return _extend_finite(F, mu, res, grade, trace)
    run = _Symbolic(mu, None if grade == "exact" else 1)
    fib = S.SymFib.of(F)
    D = S.set_of(F.base.phi)
    value = run.ext(fib, D, D, [], TOP, run.levels)[0][1]
    trace.extend(run.trace)
    return MeasureReport(value, grade, run.levels, trace)


def _extend_finite(F, mu, res, grade, trace) -> MeasureReport:
    b = mu.backend

    def measure(points, n):
        return mu.measure(b.tab(sorted(points, key=b.S.row_key), n), n)

    trail: list = []
    T = res.tree
    value = K.extend(T, res.cert, T.base, measure, zero(mu.semiring), trail)
    levels = []
    for a, pts, v in trail:
        phi = b.tab(sorted(pts, key=b.S.row_key), F.n_list[0])
        levels.append((one(mu.semiring) if a is None else a, pretty(phi), v))
    return MeasureReport(value, grade, levels, trace)


def _eqs(ts, us):
    return conj(*[Eq(t, u) for t, u in zip(ts, us)])


class _Symbolic:
    def __init__(self, mu, depth):
        self.mu = mu
        self.b = mu.backend
        self.depth = depth
        self.names = S.Names("_e")
        self.levels: list = []
        self.trace: list = []

    def qe(self, phi):
        return self.b.qe(phi)

    def nonempty(self, phi, P) -> bool:
        return self.b.find_point(S.positionalize(phi, P), len(P)) is not None

    def point(self, phi, names):
        """Constants for ``names`` satisfying ``phi`` (closed otherwise)."""
        p = self.b.find_point(S.positionalize(phi, names), len(names))
        return None if p is None else [Const(v) for v in p]

    def ext(self, fib, D, Sub, P, W, levels=None):
        """``[(class over P, value)]``: the measure of ``Sub`` for parameters in ``W``."""
        if fib.r == 0:
            return self._ext0(fib, Sub, P, W, levels)
        names = self.names
        m, n1, m1 = fib.m, fib.n_list[0], fib.m_list[0]
        img_D, img_S = S.image(fib, D, names), S.image(fib, Sub, names)
        y, z = names.terms(n1), names.terms(m1)
        yn, zn = [t.name for t in y], [t.name for t in z]
        sub_z = fib.sub(z)
        Dy = S.product_set(S.fiber(fib, D, y), img_D, m)
        V = self.qe(S.validity(sub_z, Dy, names, self.b.sig.base_pred, self.depth))

        def sub1(t):
            return conj(Sub(t[:m]), fib.g1(t[:m], y), _eqs(t[m:], y))

        W1 = conj(W, img_S(y), V)
        fibers = self.ext(sub_z, Dy, sub1, P + yn + zn, W1)
        by_value: dict = {}
        for cls, a in fibers:
            by_value.setdefault(a, []).append(cls)
        D_b = {a: self.qe(exists(zn, disj(*cs))) for a, cs in by_value.items()}
        order = sorted(D_b, key=lambda v: v.sort_key())
        self.trace.append({"depth": fib.level, "fiber values": [str(a) for a in order]})
        if not P:
            return [(TOP, self._top_sum(fib, D, img_D, V, y, z, D_b, order, levels))]
        return self._param_sum(fib, D, img_D, V, y, z, D_b, order, P, W)

    def _ext0(self, fib, Sub, P, W, levels):
        n = fib.n_list[0]
        v = self.names.take(n)
        w = self.names.take(fib.m)
        img = exists(w, conj(Sub([Var(x) for x in w]), fib.g1([Var(x) for x in w], [Var(x) for x in v])))
        if not P:
            val = self.mu.measure(S.positionalize(img, v), n)
            if levels is not None:
                levels.append((one(self.mu.semiring), pretty(self.qe(S.positionalize(img, v))), val))
            return [(TOP, val)]
        out = []
        pv = [Var(p) for p in P]
        for cls, val in self.mu.param_classes(S.positionalize(img, P + v), len(P), n):
            c = self.qe(conj(W, apply(cls, pv)))
            if self.nonempty(c, P):
                out.append((c, val))
        return out

    def _top_sum(self, fib, D, img_D, V, y, z, D_b, order, levels):
        total = zero(self.mu.semiring)
        yn = [t.name for t in y]
        y0 = self.point(img_D(y), yn)
        if y0 is None:
            return total
        zn = [t.name for t in z]
        V0 = substitute(V, dict(zip(yn, y0)))
        z0 = self.point(V0, zn)
        if z0 is None:
            raise InvalidFibering("no parameter found for a fiber", {"y": [str(c.value) for c in y0]})
        wn = self.names.take(fib.m)
        w0 = self.point(S.fiber(fib, D, y0)([Var(x) for x in wn]), wn)
        sub0 = fib.sub(z0)
        Dy0 = S.product_set(S.fiber(fib, D, y0), img_D, fib.m)
        for a in order:
            Da = D_b[a]

            def sub2(t, Da=Da):
                return conj(_eqs(t[:fib.m], w0), substitute(Da, dict(zip(yn, t[fib.m:]))))

            c = self.ext(sub0, Dy0, sub2, [], TOP)[0][1]
            total = total + a * c
            if levels is not None:
                levels.append((a, pretty(self.qe(S.positionalize(Da, yn))), c))
        return total

    def _param_sum(self, fib, D, img_D, V, y, z, D_b, order, P, W):
        names = self.names
        m = fib.m
        yn, zn = [t.name for t in y], [t.name for t in z]
        y0, z0, w0 = names.terms(len(y)), names.terms(len(z)), names.terms(m)
        chosen = [t.name for t in y0 + z0 + w0]
        V0 = substitute(V, {**dict(zip(yn, y0)), **dict(zip(zn, z0))})
        W2 = conj(W, img_D(y0), V0, S.fiber(fib, D, y0)(w0))
        sub0 = fib.sub(z0)
        Dy0 = S.product_set(S.fiber(fib, D, y0), img_D, m)
        per_b = []
        for a in order:
            Da = D_b[a]

            def sub2(t, Da=Da):
                return conj(_eqs(t[:m], w0), substitute(Da, dict(zip(yn, t[m:]))))

            got = self.ext(sub0, Dy0, sub2, P + chosen, W2)
            per_b.append([(self.qe(exists(chosen, c)), v) for c, v in got])
        empty = self.qe(conj(W, neg(exists(yn, img_D(y)))))
        out = []
        if self.nonempty(empty, P):
            out.append((empty, zero(self.mu.semiring)))
        nonempty_D = self.qe(conj(W, exists(yn, img_D(y))))
        combos = [(nonempty_D, zero(self.mu.semiring))]
        for a, classes in zip(order, per_b):
            nxt = []
            for c0, tot in combos:
                for c, v in classes:
                    cc = self.qe(conj(c0, c))
                    if self.nonempty(cc, P):
                        nxt.append((cc, tot + a * v))
            combos = nxt
        out.extend(combos)
        merged: dict = {}
        for c, v in out:
            merged.setdefault(v, []).append(c)
        return [(self.qe(disj(*cs)), v) for v, cs in sorted(merged.items(), key=lambda t: t[0].sort_key())]
