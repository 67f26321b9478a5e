"""Seeded point-sampling comparison of two formulas.

Quantified inputs are first reduced by cell truth aggregation, a route
independent of Fourier-Motzkin, so comparing ``qe(phi)`` against ``phi``
checks one elimination method against another.  Points share a common
denominator; atoms are evaluated on integer numerators with numpy.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..errors import Counterexample
from ..logic.syntax import free_vars, is_quantifier_free
from .cad import cad_qe
from .linear import to_nnf, var_key

DENOM = 840


@dataclass(frozen=True)
class SampleReport:
    trials: int
    seed: int
    variables: tuple

    def to_json(self) -> dict:
        return {"ok": True, "trials": self.trials, "seed": self.seed}


def _reduce(phi, order, base):
    if is_quantifier_free(phi):
        return to_nnf(phi, True, base)
    return to_nnf(cad_qe(phi, order, base), True, base)


def _collect(node, atoms):
    if node is True or node is False:
        return
    if node[0] == "atom":
        atoms.add(node[1])
    else:
        for n in node[1]:
            _collect(n, atoms)


def _critical(atoms):
    out = {Fraction(0), Fraction(1)}
    for _, coeffs, const in atoms:
        for _, c in coeffs:
            out.add(-const / c)
    return sorted(out)


def _probes(crit, nvars):
    mids = [(a + b) / 2 for a, b in zip(crit, crit[1:])]
    outer = [crit[0] - 1, crit[-1] + 1]
    seen = []
    for c in mids + crit + outer:
        if c not in seen:
            seen.append(c)
    return [tuple([c] * nvars) for c in seen]


def _random_points(rng, crit, nvars, count):
    span = int(max(abs(c) for c in crit)) + 2
    pts = []
    for _ in range(count):
        p = []
        for i in range(nvars):
            r = rng.random()
            if r < 0.15:
                p.append(rng.choice(crit))
            elif r < 0.3 and i:
                p.append(p[rng.randrange(i)])
            else:
                p.append(Fraction(rng.randint(-span * DENOM, span * DENOM), DENOM))
        pts.append(tuple(p))
    return pts


class _Evaluator:
    def __init__(self, order, points):
        self.order = order
        self.nums = {}
        for j, v in enumerate(order):
            col = [int(p[j] * DENOM) for p in points]
            self.nums[v] = col
        self.n = len(points)
        self.maxabs = max((abs(x) for col in self.nums.values() for x in col), default=0)
        self.cache = {}

    def atom(self, a):
        if a in self.cache:
            return self.cache[a]
        rel, coeffs, const = a
        den = math.lcm(const.denominator, *(c.denominator for _, c in coeffs))
        ints = [(v, int(c * den)) for v, c in coeffs]
        k = int(const * den) * DENOM
        bound = sum(abs(c) for _, c in ints) * self.maxabs + abs(k)
        dtype = np.int64 if bound < 2 ** 62 else object
        s = np.full(self.n, k, dtype=dtype)
        for v, c in ints:
            s = s + np.asarray(self.nums[v], dtype=dtype) * c
        out = (s < 0) if rel == "<" else (s == 0)
        out = np.asarray(out, dtype=bool)
        self.cache[a] = out
        return out

    def node(self, n):
        if n is True:
            return np.ones(self.n, dtype=bool)
        if n is False:
            return np.zeros(self.n, dtype=bool)
        if n[0] == "atom":
            return self.atom(n[1])
        parts = [self.node(s) for s in n[1]]
        op = np.logical_and if n[0] == "and" else np.logical_or
        return op.reduce(parts)


def sample_equiv(phi, psi, trials: int, seed: int, base=None) -> SampleReport:
    """Compare ``phi`` and ``psi`` on ``trials`` seeded rational points.

    Raises ``Counterexample`` carrying the first disagreeing valuation.
    """
    if seed is None:
        raise ValueError("sampling requires an explicit seed")
    order = tuple(sorted(free_vars(phi) | free_vars(psi), key=var_key))
    a, b = _reduce(phi, order, base), _reduce(psi, order, base)
    atoms = set()
    _collect(a, atoms)
    _collect(b, atoms)
    crit = _critical(atoms)
    nvars = len(order)
    rng = random.Random(seed)
    points = _probes(crit, nvars)[:trials] if nvars else [()]
    points += _random_points(rng, crit, nvars, max(0, trials - len(points))) if nvars else []
    ev = _Evaluator(order, points)
    diff = np.nonzero(ev.node(a) != ev.node(b))[0]
    if len(diff):
        p = points[int(diff[0])]
        raise Counterexample("formulas disagree", {v: str(x) for v, x in zip(order, p)})
    return SampleReport(len(points), seed, order)
