"""Explicit finite structures with the counting measure.

This backend is an oracle for the engine's arithmetic.  Its base set ``C`` is
finite, so it is not a model of the tame settings the engine targets; every
count it reports is exact by enumeration.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from itertools import product as cartesian
from pathlib import Path

from ..backend import Backend
from ..errors import SignatureMismatch, SortError
from ..logic.signature import FINITE, finite_signature
from ..logic.syntax import (And, Bot, Const, Eq, Exists, Forall, Lin, Lt, Not, Or, Rel, Tab,
                            Top, Var, free_vars, position, vars_)
from ..memo import memoized
from ..semiring import COUNT, make


@dataclass(frozen=True)
class FiniteStructure:
    universe: tuple
    base: tuple
    c0: object
    c1: object
    relations: tuple
    name: str = "finite"

    def __post_init__(self):
        if len(set(self.universe)) != len(self.universe):
            raise ValueError("universe has repeated elements")
        u = set(self.universe)
        if not set(self.base) <= u:
            raise ValueError("base must be a subset of the universe")
        if len(self.base) < 2:
            raise ValueError("base needs at least two elements")
        if self.c0 == self.c1 or self.c0 not in self.base or self.c1 not in self.base:
            raise ValueError("c0 and c1 must be distinct base elements")
        for rname, rows in self.relations:
            for row in rows:
                if not set(row) <= u:
                    raise ValueError(f"relation {rname} has a tuple outside the universe")

    @classmethod
    def from_json(cls, data, name: str | None = None) -> "FiniteStructure":
        if isinstance(data, (str, Path)):
            p = Path(data)
            name = name or p.stem
            data = json.loads(p.read_text())
        rels = []
        for rname, rows in sorted(data.get("relations", {}).items()):
            rels.append((rname, frozenset(tuple(r) for r in rows)))
        return cls(tuple(data["universe"]), tuple(data["base"]), data["c0"], data["c1"],
                   tuple(rels), name or data.get("name", "finite"))

    def to_json(self) -> dict:
        return {"universe": list(self.universe), "base": list(self.base), "c0": self.c0,
                "c1": self.c1,
                "relations": {n: sorted(map(list, rows), key=self.row_key) for n, rows in self.relations}}

    @property
    def rel_map(self) -> dict:
        return dict(self.relations)

    def row_key(self, row):
        idx = {e: i for i, e in enumerate(self.universe)}
        return tuple(idx[e] for e in row)

    def signature(self):
        arities = {}
        for n, rows in self.relations:
            arities[n] = len(next(iter(rows))) if rows else 0
        return finite_signature(self.name, self.universe, self.c0, self.c1, arities)


class FiniteBackend(Backend):
    name = "counting"
    symbolic = False
    kinds = {"count": COUNT}

    def __init__(self, structure: FiniteStructure):
        super().__init__(structure.signature())
        self.S = structure
        self.rels = structure.rel_map
        self.base_set = frozenset(structure.base)
        self.index = {e: i for i, e in enumerate(structure.universe)}

    def __repr__(self):
        return f"FiniteBackend({self.S.name})"

    def check_sig(self, sig) -> None:
        if sig.theory != FINITE or sig.name != self.sig.name:
            raise SignatureMismatch(f"formula signature {sig.name!r} does not match structure {self.S.name!r}")

    # ----------------------------------------------------------- evaluation
    def term(self, t, env):
        if isinstance(t, Var):
            return env[t.name]
        if isinstance(t, Const):
            return t.value
        raise SortError(f"term {t!r} not in the finite signature")

    def holds_env(self, phi, env) -> bool:
        if isinstance(phi, Top):
            return True
        if isinstance(phi, Bot):
            return False
        if isinstance(phi, Eq):
            return self.term(phi.left, env) == self.term(phi.right, env)
        if isinstance(phi, Rel):
            args = tuple(self.term(a, env) for a in phi.args)
            if phi.name == self.sig.base_pred:
                return args[0] in self.base_set
            if phi.name not in self.rels:
                raise SortError(f"unknown relation {phi.name!r}")
            return args in self.rels[phi.name]
        if isinstance(phi, Tab):
            return tuple(self.term(a, env) for a in phi.args) in phi.rows
        if isinstance(phi, Not):
            return not self.holds_env(phi.arg, env)
        if isinstance(phi, And):
            return all(self.holds_env(a, env) for a in phi.args)
        if isinstance(phi, Or):
            return any(self.holds_env(a, env) for a in phi.args)
        if isinstance(phi, (Exists, Forall)):
            saved = env.get(phi.var, _MISSING)
            test = any if isinstance(phi, Exists) else all
            try:
                return test(self._with(env, phi.var, e, phi.body) for e in self.S.universe)
            finally:
                if saved is _MISSING:
                    env.pop(phi.var, None)
                else:
                    env[phi.var] = saved
        if isinstance(phi, (Lt, Lin)):
            raise SortError("order and arithmetic are not in the finite signature")
        raise TypeError(f"unsupported node {phi!r}")

    def _with(self, env, v, e, body):
        env[v] = e
        return self.holds_env(body, env)

    def holds(self, phi, point) -> bool:
        return self.holds_env(phi, {f"x{i}": e for i, e in enumerate(point, start=1)})

    # ---------------------------------------------------------- enumeration
    def iter_points(self, phi, arity: int):
        """Satisfying tuples in lexicographic (universe) order."""
        names = [f"x{i}" for i in range(1, arity + 1)]
        conjuncts = list(phi.args) if isinstance(phi, And) else [phi]
        ready = [[] for _ in range(arity + 1)]
        for c in conjuncts:
            pos = [position(v) for v in free_vars(c)]
            ready[max(pos, default=0)].append(c)
        for c in ready[0]:
            if not self.holds_env(c, {}):
                return
        table = next((c for c in conjuncts if _covers(c, names)), None)
        if table is not None:
            yield from self._scan(table, names, conjuncts)
            return
        yield from self._search(names, ready, conjuncts, {}, 0)

    def _scan(self, table, names, conjuncts):
        """Rows of a table that binds every variable, filtered by the rest."""
        slots = [a.name for a in table.args]
        others = [c for c in conjuncts if c is not table]
        found = []
        for row in table.rows:
            env = dict(zip(slots, row))
            if all(self.holds_env(c, env) for c in others):
                found.append(tuple(env[n] for n in names))
        found.sort(key=lambda t: tuple(self.index[e] for e in t))
        yield from found

    def _search(self, names, ready, conjuncts, env, i):
        if i == len(names):
            yield tuple(env[n] for n in names)
            return
        v = names[i]
        for e in self._candidates(v, conjuncts, env):
            env[v] = e
            if all(self.holds_env(c, env) for c in ready[i + 1]):
                yield from self._search(names, ready, conjuncts, env, i + 1)
        env.pop(v, None)

    def _candidates(self, v, conjuncts, env):
        """Universe elements for ``v`` allowed by generator conjuncts."""
        allowed = None
        for c in conjuncts:
            got = None
            if isinstance(c, Eq):
                for a, b in ((c.left, c.right), (c.right, c.left)):
                    if isinstance(a, Var) and a.name == v:
                        if isinstance(b, Const):
                            got = {b.value}
                        elif isinstance(b, Var) and b.name in env:
                            got = {env[b.name]}
            elif isinstance(c, (Rel, Tab)):
                if isinstance(c, Rel) and c.name == self.sig.base_pred:
                    if isinstance(c.args[0], Var) and c.args[0].name == v:
                        got = set(self.base_set)
                else:
                    rows = c.rows if isinstance(c, Tab) else self.rels.get(c.name, ())
                    got = self._column(rows, c.args, v, env)
            if got is not None:
                allowed = got if allowed is None else allowed & got
        if allowed is None:
            return self.S.universe
        return sorted(allowed, key=self.index.__getitem__)

    def _column(self, rows, args, v, env):
        slots = [j for j, a in enumerate(args) if isinstance(a, Var) and a.name == v]
        if not slots:
            return None
        fixed = []
        for j, a in enumerate(args):
            if isinstance(a, Const):
                fixed.append((j, a.value))
            elif isinstance(a, Var) and a.name in env and a.name != v:
                fixed.append((j, env[a.name]))
        out = set()
        for row in rows:
            if all(row[j] == val for j, val in fixed) and len({row[j] for j in slots}) == 1:
                out.add(row[slots[0]])
        return out

    def enumerate(self, phi, arity: int) -> list:
        return _enumerate(self, phi, arity)

    def find_point(self, phi, arity: int):
        for p in self.iter_points(phi, arity):
            return p
        return None

    def qe(self, phi):
        return phi

    def measure(self, kind: str, phi, arity: int):
        if kind != "count":
            raise ValueError(f"unknown measure {kind!r} for the counting backend")
        return make(COUNT, len(self.enumerate(phi, arity)))

    def tab(self, points, arity: int, first: int = 1):
        """``Tab`` formula for an explicit point set on x(first)..."""
        return Tab(frozenset(points), tuple(vars_(first, arity)))

    def param_classes(self, phi, k: int, m: int, kind: str = "count"):
        counts: dict = {}
        for p in cartesian(self.S.universe, repeat=k):
            counts[p] = 0
        for pt in self.enumerate(phi, k + m):
            counts[pt[:k]] += 1
        groups: dict = {}
        for p, c in counts.items():
            groups.setdefault(c, []).append(p)
        return [(self.tab(groups[c], k), make(COUNT, c)) for c in sorted(groups)]

    def fmt_point(self, point) -> list:
        return list(point)


_MISSING = object()


def _covers(c, names) -> bool:
    if not isinstance(c, Tab) or not all(isinstance(a, Var) for a in c.args):
        return False
    slots = [a.name for a in c.args]
    return len(set(slots)) == len(slots) and set(names) <= set(slots)


@memoized
def _enumerate(b: FiniteBackend, phi, arity: int) -> list:
    return list(b.iter_points(phi, arity))
