"""The r-step fibering record and its JSON form.

Graph ``j`` (1-based) lives in ``M^L`` with positional layout::

    [x-blocks m_1..m_{j-1}] [domain point m + n_1 + .. + n_{j-1}] [output n_j]

so ``f_j(x, -)`` for a parameter tuple ``x`` is the section at the first
``m_1 + .. + m_{j-1}`` coordinates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..errors import MalformedFibering
from ..logic.printer import pretty
from ..logic.sets import DefinableSet


def param_len(m_list, j: int) -> int:
    return sum(m_list[: j - 1])


def dom_len(m: int, n_list, j: int) -> int:
    return m + sum(n_list[: j - 1])


def graph_arity(m: int, m_list, n_list, j: int) -> int:
    return param_len(m_list, j) + dom_len(m, n_list, j) + n_list[j - 1]


@dataclass(frozen=True)
class Fibering:
    r: int
    m: int
    m_list: tuple
    n_list: tuple
    base: DefinableSet
    maps: tuple

    def __post_init__(self):
        if self.r < 0:
            raise MalformedFibering("negative step count")
        if len(self.m_list) != self.r or len(self.n_list) != self.r + 1:
            raise MalformedFibering(
                f"r={self.r} needs {self.r} parameter arities and {self.r + 1} target arities",
                {"m_list": list(self.m_list), "n_list": list(self.n_list)})
        if any(v < 0 for v in self.m_list) or any(v < 0 for v in self.n_list):
            raise MalformedFibering("arities must be natural numbers")
        if self.base.arity != self.m:
            raise MalformedFibering(f"base has arity {self.base.arity}, expected m={self.m}")
        if len(self.maps) != self.r + 1:
            raise MalformedFibering(f"expected {self.r + 1} maps, got {len(self.maps)}")
        for j, g in enumerate(self.maps, start=1):
            want = graph_arity(self.m, self.m_list, self.n_list, j)
            if g.arity != want:
                raise MalformedFibering(f"graph of f{j} has arity {g.arity}, layout needs {want}",
                                        {"map": j})

    @property
    def sig(self):
        return self.base.sig

    def arity(self, j: int) -> int:
        return graph_arity(self.m, self.m_list, self.n_list, j)

    def to_json(self) -> dict:
        return {"r": self.r, "m": self.m, "m_list": list(self.m_list),
                "n_list": list(self.n_list), "base": pretty(self.base.phi),
                "maps": [pretty(g.phi) for g in self.maps]}

    @classmethod
    def from_json(cls, data, backend) -> "Fibering":
        if isinstance(data, (str, Path)):
            data = json.loads(Path(data).read_text())
        for key in ("r", "m", "m_list", "n_list", "base", "maps"):
            if key not in data:
                raise MalformedFibering(f"fibering record lacks {key!r}; arities must be explicit")
        r, m = int(data["r"]), int(data["m"])
        m_list, n_list = tuple(data["m_list"]), tuple(data["n_list"])
        base = DefinableSet(backend.sig, m, backend.parse(data["base"]))
        if len(data["maps"]) != r + 1 or len(m_list) != r or len(n_list) != r + 1:
            raise MalformedFibering("map or arity list length does not match r")
        maps = tuple(DefinableSet(backend.sig, graph_arity(m, m_list, n_list, j), backend.parse(t))
                     for j, t in enumerate(data["maps"], start=1))
        return cls(r, m, m_list, n_list, base, maps)
