"""A switchable memo table for pure backend computations.

Caching never changes a result; tests turn it off to prove that.
"""

from __future__ import annotations

import functools
from contextlib import contextmanager

_state = {"enabled": True}
_tables: list[dict] = []


def memoized(fn):
    table: dict = {}
    _tables.append(table)

    @functools.wraps(fn)
    def wrapper(*args):
        if not _state["enabled"]:
            return fn(*args)
        try:
            return table[args]
        except KeyError:
            out = table[args] = fn(*args)
            return out

    return wrapper


def clear() -> None:
    for t in _tables:
        t.clear()


def enabled() -> bool:
    return _state["enabled"]


@contextmanager
def disabled():
    prev = _state["enabled"]
    _state["enabled"] = False
    try:
        yield
    finally:
        _state["enabled"] = prev
