"""Signatures for the three supported theories."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

from ..errors import SortError

ORDERED_QVS = "ORDERED_QVS"
PURE_SET = "PURE_SET"
FINITE = "FINITE"
THEORIES = (ORDERED_QVS, PURE_SET, FINITE)


@dataclass(frozen=True)
class Signature:
    """A one-sorted signature.

    ``constants`` maps names to the element they denote; ``c0``/``c1`` are the
    designated distinct base elements.  ``relations`` maps relation symbols to
    arities (FINITE only).  ``base_pred`` names the unary predicate for C.
    """

    theory: str
    constants: tuple = ()
    relations: tuple = ()
    base_pred: str = "C"
    name: str = ""
    _const_map: dict = field(default=None, compare=False, hash=False, repr=False)
    _rel_map: dict = field(default=None, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if self.theory not in THEORIES:
            raise SortError(f"unknown theory {self.theory!r}")
        object.__setattr__(self, "_const_map", dict(self.constants))
        object.__setattr__(self, "_rel_map", dict(self.relations))
        cm = self._const_map
        if "c0" not in cm or "c1" not in cm:
            raise SortError("signature must name c0 and c1")
        if cm["c0"] == cm["c1"]:
            raise SortError("c0 and c1 must be distinct")
        if self.base_pred in self._rel_map and self._rel_map[self.base_pred] != 1:
            raise SortError("base predicate must be unary")

    @property
    def const_map(self) -> Mapping[str, Any]:
        return self._const_map

    @property
    def rel_map(self) -> Mapping[str, int]:
        return self._rel_map

    @property
    def c0(self):
        return self._const_map["c0"]

    @property
    def c1(self):
        return self._const_map["c1"]

    def is_constant(self, name: str) -> bool:
        return name in self._const_map

    def relation_arity(self, name: str) -> int | None:
        if name == self.base_pred:
            return 1
        return self._rel_map.get(name)


def qvs_signature(extra: Mapping[str, Any] | None = None) -> Signature:
    consts = {"c0": Fraction(0), "c1": Fraction(1)}
    for k, v in (extra or {}).items():
        consts[k] = Fraction(v)
    return Signature(ORDERED_QVS, tuple(sorted(consts.items())))


def pure_set_signature(names=()) -> Signature:
    consts = {"c0": "c0", "c1": "c1"}
    for n in names:
        consts[n] = n
    return Signature(PURE_SET, tuple(sorted(consts.items())))


def finite_signature(name: str, universe, c0, c1, relations: Mapping[str, int]) -> Signature:
    consts = {"c0": c0, "c1": c1}
    for e in universe:
        if isinstance(e, str) and e.isidentifier():
            consts.setdefault(e, e)
    return Signature(
        FINITE,
        tuple(sorted(consts.items(), key=lambda kv: kv[0])),
        tuple(sorted(relations.items())),
        name=name,
    )
