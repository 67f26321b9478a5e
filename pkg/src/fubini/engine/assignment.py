"""Measure assignments: which backend value is taken on base-category sets."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product as cartesian
from typing import Callable

from ..errors import NotInBase
from ..logic.syntax import Const, apply, conj, vars_
from ..semiring import SemiringValue, make, pair_id

KIND_NAMES = {"euler": "SEMILINEAR_EULER", "dim": "SEMILINEAR_DIM", "count": "COUNTING",
              "morley": "MORLEY_RANK", "pure_euler": "PURE_EULER"}


@dataclass(frozen=True, eq=False)
class MeasureAssignment:
    """A base measure on the sets of one backend.

    ``kind`` names a measure the backend provides, or is ``"pair"`` with two
    ``parts``.  ``adjust`` rewrites values and exists to build deliberately
    broken measures for the auditor's own tests.
    """

    backend: object
    kind: str
    parts: tuple = ()
    adjust: Callable | None = field(default=None, compare=False)
    label: str = ""

    def __post_init__(self):
        if self.kind == "pair":
            if len(self.parts) != 2:
                raise ValueError("a pair measure needs two parts")
        elif self.kind not in self.backend.kinds:
            raise ValueError(f"backend {self.backend.name!r} has no measure {self.kind!r}; "
                             f"choose from {sorted(self.backend.kinds)}")

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        if self.kind == "pair":
            return f"PAIR({self.parts[0].name},{self.parts[1].name})"
        return KIND_NAMES.get(self.kind, self.kind.upper())

    @property
    def semiring(self):
        if self.kind == "pair":
            return pair_id(self.parts[0].semiring, self.parts[1].semiring)
        return self.backend.semiring(self.kind)

    def measure(self, phi, arity: int) -> SemiringValue:
        """Value on ``{x : phi}``, assumed to lie in ``C^arity``."""
        if self.kind == "pair":
            a, b = (p.measure(phi, arity) for p in self.parts)
            v = make(self.semiring, (a, b))
        else:
            v = self.backend.measure(self.kind, phi, arity)
        return self.adjust(self, phi, arity, v) if self.adjust else v

    def param_classes(self, phi, k: int, m: int) -> list:
        """``[(class over x1..xk, value)]`` for the sections of ``phi``."""
        if self.adjust is not None:
            return _classes_by_points(self, phi, k, m)
        if self.kind != "pair":
            return self.backend.param_classes(phi, k, m, self.kind)
        left = self.parts[0].param_classes(phi, k, m)
        right = self.parts[1].param_classes(phi, k, m)
        out = []
        for c1, v1 in left:
            for c2, v2 in right:
                c = conj(c1, c2)
                if self.backend.find_point(c, k) is not None:
                    out.append((c, make(self.semiring, (v1, v2))))
        return sorted(out, key=lambda t: t[1].sort_key())

    def base_measure(self, X) -> SemiringValue:
        """The measure of a definable set, after checking it lies in the base."""
        w = self.backend.find_point(self.backend.outside_base(X.phi, X.arity), X.arity)
        if w is not None:
            raise NotInBase(f"point outside C^{X.arity}", self.backend.fmt_point(w))
        return self.measure(X.phi, X.arity)


def _classes_by_points(mu: MeasureAssignment, phi, k: int, m: int) -> list:
    """Classes for an adjusted measure.

    Finite backends regroup every parameter.  Symbolic ones keep the classes
    of the unadjusted measure and evaluate each at one sample parameter.
    """
    b = mu.backend
    if b.symbolic:
        plain = MeasureAssignment(b, mu.kind, mu.parts)
        out = []
        for cls, _ in plain.param_classes(phi, k, m):
            p = b.find_point(cls, k)
            out.append((cls, mu.measure(apply(phi, [Const(e) for e in p] + vars_(1, m)), m)))
        return out
    groups: dict = {}
    for p in cartesian(b.S.universe, repeat=k):
        section = apply(phi, [Const(e) for e in p] + vars_(1, m))
        groups.setdefault(mu.measure(section, m), []).append(p)
    return [(b.tab(groups[v], k), v) for v in sorted(groups, key=lambda t: t.sort_key())]


def pair_measure(mu: MeasureAssignment, nu: MeasureAssignment) -> MeasureAssignment:
    if mu.backend is not nu.backend:
        raise ValueError("pair components must share a backend")
    return MeasureAssignment(mu.backend, "pair", (mu, nu))


def corrupted(mu: MeasureAssignment, fn: Callable, label: str = "") -> MeasureAssignment:
    """``mu`` with values passed through ``fn(mu, phi, arity, value)``."""
    return MeasureAssignment(mu.backend, mu.kind, mu.parts, fn, label or f"corrupted {mu.name}")
