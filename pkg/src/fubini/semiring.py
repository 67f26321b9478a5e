"""Exact commutative semirings for measure values.

Four semirings are supported: the integers (``INT``), the tropical semiring
``N_trop`` (``TROP``, max as addition, + as multiplication, with a distinct
``-inf`` token as zero), the naturals (``COUNT``) and binary products
(``PAIR``).  Values are immutable and compare structurally.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Any, Iterable


class MismatchedSemiring(ValueError):
    """Raised when two values from different semirings are combined."""


class _NegInf:
    """The tropical zero.  A singleton, never an integer sentinel."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NEG_INF"

    def __reduce__(self):
        return (_NegInf, ())


NEG_INF = _NegInf()


@dataclass(frozen=True)
class SemiringId:
    tag: str
    left: "SemiringId | None" = None
    right: "SemiringId | None" = None

    def __post_init__(self):
        if self.tag == "PAIR":
            if self.left is None or self.right is None:
                raise ValueError("PAIR semiring needs two components")
        elif self.tag in ("INT", "TROP", "COUNT"):
            if self.left is not None or self.right is not None:
                raise ValueError(f"{self.tag} takes no components")
        else:
            raise ValueError(f"unknown semiring tag {self.tag!r}")

    def __str__(self):
        if self.tag == "PAIR":
            return f"PAIR({self.left},{self.right})"
        return self.tag

    @classmethod
    def parse(cls, text: str) -> "SemiringId":
        text = text.strip()
        if text.startswith("PAIR(") and text.endswith(")"):
            inner = text[5:-1]
            depth = 0
            for i, ch in enumerate(inner):
                if ch == "(":
                    depth += 1
                elif ch == ")":
                    depth -= 1
                elif ch == "," and depth == 0:
                    return pair_id(cls.parse(inner[:i]), cls.parse(inner[i + 1:]))
            raise ValueError(f"malformed semiring id {text!r}")
        return cls(text)


INT = SemiringId("INT")
TROP = SemiringId("TROP")
COUNT = SemiringId("COUNT")


def pair_id(left: SemiringId, right: SemiringId) -> SemiringId:
    return SemiringId("PAIR", left, right)


def _check_payload(sid: SemiringId, payload: Any) -> None:
    if sid.tag == "INT":
        ok = isinstance(payload, int) and not isinstance(payload, bool)
    elif sid.tag == "COUNT":
        ok = isinstance(payload, int) and not isinstance(payload, bool) and payload >= 0
    elif sid.tag == "TROP":
        ok = payload is NEG_INF or (
            isinstance(payload, int) and not isinstance(payload, bool) and payload >= 0
        )
    else:
        ok = (
            isinstance(payload, tuple)
            and len(payload) == 2
            and isinstance(payload[0], SemiringValue)
            and isinstance(payload[1], SemiringValue)
            and payload[0].id == sid.left
            and payload[1].id == sid.right
        )
    if not ok:
        raise ValueError(f"payload {payload!r} does not fit semiring {sid}")


@dataclass(frozen=True)
class SemiringValue:
    id: SemiringId
    payload: Any

    def __post_init__(self):
        _check_payload(self.id, self.payload)

    def __add__(self, other: "SemiringValue") -> "SemiringValue":
        return add(self, other)

    def __mul__(self, other: "SemiringValue") -> "SemiringValue":
        return mul(self, other)

    def __repr__(self):
        return f"{self.id}:{format_value(self)}"

    def sort_key(self):
        """Canonical report order: INT ascending, TROP with -inf first,
        PAIR lexicographic."""
        if self.id.tag == "PAIR":
            return (self.payload[0].sort_key(), self.payload[1].sort_key())
        if self.payload is NEG_INF:
            return (0, 0)
        return (1, self.payload)

    def to_json(self) -> dict:
        return {"semiring": str(self.id), "value": json_payload(self)}

    @classmethod
    def from_json(cls, data: dict) -> "SemiringValue":
        return value_from_payload(SemiringId.parse(data["semiring"]), data["value"])


def json_payload(v: SemiringValue):
    if v.id.tag == "PAIR":
        return [json_payload(v.payload[0]), json_payload(v.payload[1])]
    if v.payload is NEG_INF:
        return "neg_inf"
    return v.payload


def value_from_payload(sid: SemiringId, raw) -> SemiringValue:
    if isinstance(raw, SemiringValue):
        if raw.id != sid:
            raise MismatchedSemiring(f"{raw!r} is not a value of {sid}")
        return raw
    if sid.tag == "PAIR":
        if not isinstance(raw, (list, tuple)) or len(raw) != 2:
            raise ValueError(f"PAIR value needs two components, got {raw!r}")
        return SemiringValue(
            sid, (value_from_payload(sid.left, raw[0]), value_from_payload(sid.right, raw[1]))
        )
    if raw == "neg_inf":
        return SemiringValue(sid, NEG_INF)
    return SemiringValue(sid, raw)


def format_value(v: SemiringValue) -> str:
    if v.id.tag == "PAIR":
        return f"({format_value(v.payload[0])}, {format_value(v.payload[1])})"
    if v.payload is NEG_INF:
        return "-inf"
    return str(v.payload)


def make(sid: SemiringId, payload) -> SemiringValue:
    """Build a value, accepting nested tuples/lists for PAIR payloads."""
    return value_from_payload(sid, payload)


def zero(sid: SemiringId) -> SemiringValue:
    if sid.tag == "PAIR":
        return SemiringValue(sid, (zero(sid.left), zero(sid.right)))
    if sid.tag == "TROP":
        return SemiringValue(sid, NEG_INF)
    return SemiringValue(sid, 0)


def one(sid: SemiringId) -> SemiringValue:
    if sid.tag == "PAIR":
        return SemiringValue(sid, (one(sid.left), one(sid.right)))
    if sid.tag == "TROP":
        return SemiringValue(sid, 0)
    return SemiringValue(sid, 1)


def _same(x: SemiringValue, y: SemiringValue) -> SemiringId:
    if x.id != y.id:
        raise MismatchedSemiring(f"cannot combine {x.id} with {y.id}")
    return x.id


def add(x: SemiringValue, y: SemiringValue) -> SemiringValue:
    sid = _same(x, y)
    if sid.tag == "PAIR":
        return SemiringValue(sid, (add(x.payload[0], y.payload[0]), add(x.payload[1], y.payload[1])))
    if sid.tag == "TROP":
        if x.payload is NEG_INF:
            return y
        if y.payload is NEG_INF:
            return x
        return SemiringValue(sid, max(x.payload, y.payload))
    return SemiringValue(sid, x.payload + y.payload)


def mul(x: SemiringValue, y: SemiringValue) -> SemiringValue:
    sid = _same(x, y)
    if sid.tag == "PAIR":
        return SemiringValue(sid, (mul(x.payload[0], y.payload[0]), mul(x.payload[1], y.payload[1])))
    if sid.tag == "TROP":
        if x.payload is NEG_INF or y.payload is NEG_INF:
            return SemiringValue(sid, NEG_INF)
        return SemiringValue(sid, x.payload + y.payload)
    return SemiringValue(sid, x.payload * y.payload)


def total(values: Iterable[SemiringValue], sid: SemiringId) -> SemiringValue:
    return reduce(add, values, zero(sid))


def product(values: Iterable[SemiringValue], sid: SemiringId) -> SemiringValue:
    return reduce(mul, values, one(sid))


def from_nat(d: int, sid: SemiringId) -> SemiringValue:
    """Image of ``d`` under the unique semiring morphism N -> A."""
    if d < 0:
        raise ValueError("from_nat expects a natural number")
    if sid.tag == "PAIR":
        return SemiringValue(sid, (from_nat(d, sid.left), from_nat(d, sid.right)))
    if sid.tag == "TROP":
        return zero(sid) if d == 0 else one(sid)
    return SemiringValue(sid, d)


def scale(d: int, a: SemiringValue) -> SemiringValue:
    """``d a`` in the sense of the N-module structure."""
    return mul(from_nat(d, a.id), a)
