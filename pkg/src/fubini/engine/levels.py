"""Level sets of fiber measures, and the weighted sum along a map."""

from __future__ import annotations

import os
from dataclasses import dataclass

from ..errors import (CodomainNotMeasurable, FiberNotMeasurable, SectionNotMeasurable,
                      TooManyValues)
from ..logic.printer import pretty
from ..logic.sets import DefinableMap, DefinableSet
from ..logic.syntax import Rel, Var, apply, conj, exists, neg, vars_
from ..semiring import json_payload, zero

DEFAULT_MAX_LEVELS = 64


def max_levels() -> int:
    return int(os.environ.get("FUBINI_MAX_LEVELS", DEFAULT_MAX_LEVELS))


@dataclass
class LevelSetReport:
    map: DefinableMap
    classes: list
    total: object

    def to_json(self) -> dict:
        return {"total": json_payload(self.total), "semiring": str(self.total.id),
                "classes": [{"a": json_payload(a), "class": pretty(Y.phi), "mu": json_payload(v)}
                            for a, Y, v in self.classes]}


def base_measure(Y: DefinableSet, mu):
    return mu.base_measure(Y)


def _bounded(classes: list) -> list:
    bound = max_levels()
    if len(classes) > bound:
        raise TooManyValues(f"{len(classes)} distinct fiber values exceed the bound {bound}",
                            {"bound": bound, "values": [str(v) for _, v in classes[:bound + 1]]})
    return classes


def param_level_sets(S: DefinableSet, k: int, mu) -> list:
    """``[(P_a, a)]``: the parameters ``p`` with ``mu(S(p)) = a``.

    ``S`` lives in ``M^k x M^m``; every section must lie in ``C^m``.
    """
    b, m = mu.backend, S.arity - k
    w = b.find_point(b.outside_base(S.phi, S.arity) if k == 0 else
                     conj(S.phi, _outside_tail(b, k, m)), S.arity)
    if w is not None:
        raise SectionNotMeasurable("section leaves the base", {"p": b.fmt_point(w[:k])})
    out = []
    for cls, v in _bounded(mu.param_classes(S.phi, k, m)):
        phi = b.qe(cls)
        if b.find_point(phi, k) is not None:
            out.append((DefinableSet(S.sig, k, phi), v))
    return out


def _outside_tail(b, k: int, m: int):
    return neg(conj(*[Rel(b.sig.base_pred, (Var(f"x{k + i}"),)) for i in range(1, m + 1)]))


def level_sets(f: DefinableMap, mu) -> LevelSetReport:
    """Classes ``Y_a`` of image points whose fiber has measure ``a``."""
    b = mu.backend
    m, n = f.dom_arity, f.cod_arity
    G = f.graph.phi
    w = b.find_point(conj(G, _outside_head(b, m)), m + n)
    if w is not None:
        raise FiberNotMeasurable("fiber leaves the base", {"y": b.fmt_point(w[m:])})
    swapped = apply(G, vars_(n + 1, m) + vars_(1, n))
    img = exists([f"_i{i}" for i in range(m)],
                 apply(G, [Var(f"_i{i}") for i in range(m)] + vars_(1, n)))
    w = b.find_point(conj(img, _outside_tail(b, 0, n)), n)
    if w is not None:
        raise CodomainNotMeasurable("image leaves the base", {"y": b.fmt_point(w)})
    classes = []
    total = zero(mu.semiring)
    for cls, a in _bounded(mu.param_classes(swapped, n, m)):
        phi = b.qe(conj(cls, img))
        if b.find_point(phi, n) is None:
            continue
        Y = DefinableSet(f.sig, n, phi)
        v = mu.measure(phi, n)
        classes.append((a, Y, v))
        total = total + a * v
    return LevelSetReport(f, classes, total)


def _outside_head(b, m: int):
    return neg(conj(*[Rel(b.sig.base_pred, (Var(f"x{i}"),)) for i in range(1, m + 1)]))


def mu_f(X: DefinableSet, f: DefinableMap, mu):
    """``sum_a a * mu(Y_a)`` for ``f`` restricted to ``X``."""
    m = f.dom_arity
    G = conj(f.graph.phi, X.phi)
    g = DefinableMap(DefinableSet(f.sig, m + f.cod_arity, G), m, f.cod_arity)
    return level_sets(g, mu).total
