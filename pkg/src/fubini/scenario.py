"""Scenario files: a backend, named sets, maps and fiberings, and tasks.

Schema (``schema_version`` 1)::

    {"schema_version": 1,
     "backend": {"theory": "semilinear", "base": "0 < x1"}      # base optional
              | {"theory": "pureset"}
              | {"theory": "finite", "structure": {...} | "file.json"},
     "sets": {"X": {"arity": 2, "formula": "..."}},
     "maps": {"f": {"dom": 2, "cod": 1, "graph": "..."}},
     "fiberings": {"F": {"r": 1, "m": 2, "m_list": [1], "n_list": [1, 2],
                         "base": "...", "maps": ["...", "..."]}},
     "tasks": [{"command": "extend", "fibering": "F", "measure": "euler", "expect": 3},
               {"command": "oracle", "oracle": "sample-equiv", "formula": "...", "seed": 0},
               {"command": "suite", "suite": "counting", "seed": 0, "count": 200}]}

Oracle tasks name ``enumeration`` (with a fibering), ``cell-alternating-sum``
(with a set) or ``sample-equiv`` (with a formula, an optional candidate and a
seed).  ``description`` and ``limits`` are free-form and ignored by the loader.

The backend may be left out when the file holds only suite tasks.  Structure
file names resolve relative to the scenario file.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .discrete import FiniteBackend, FiniteStructure, PureSetBackend
from .engine.assignment import MeasureAssignment, pair_measure
from .errors import FubiniError, ScenarioError
from .fibering import Fibering
from .logic.sets import DefinableMap
from .semilinear import SemilinearBackend

SCHEMA_VERSION = 1

MEASURES = {"euler": "semilinear", "dim": "semilinear", "counting": "finite", "count": "finite",
            "morley": "pureset", "pure_euler": "pureset"}


@dataclass
class Scenario:
    backend: object
    sets: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    fiberings: dict = field(default_factory=dict)
    tasks: list = field(default_factory=list)
    raw: dict = field(default_factory=dict)
    path: Path | None = None

    def get(self, kind: str, name: str):
        table = getattr(self, kind)
        if name not in table:
            have = ", ".join(sorted(table)) or "none"
            raise ScenarioError(f"no {kind[:-1]} named {name!r} (have: {have})", f"{kind}.{name}")
        return table[name]

    def only(self, kind: str) -> str:
        table = getattr(self, kind)
        if len(table) != 1:
            raise ScenarioError(f"scenario has {len(table)} {kind}; name one explicitly", kind)
        return next(iter(table))

    def measure(self, kind: str) -> MeasureAssignment:
        if self.backend is None:
            raise ScenarioError("scenario has no backend", "backend")
        return make_measure(self.backend, kind)


def make_backend(entry, where: Path | None = None):
    theory = entry.get("theory")
    if theory == "semilinear":
        return SemilinearBackend(base=entry.get("base"))
    if theory == "pureset":
        return PureSetBackend()
    if theory == "finite":
        return FiniteBackend(load_structure(entry.get("structure"), where))
    raise ScenarioError(f"unknown theory {theory!r}; use semilinear, pureset or finite", "backend.theory")


def load_structure(src, where: Path | None = None) -> FiniteStructure:
    if src is None:
        raise ScenarioError("finite backend needs a structure", "backend.structure")
    try:
        if isinstance(src, str):
            p = Path(src)
            if not p.is_absolute() and where is not None and not p.exists():
                p = where / p
            return FiniteStructure.from_json(p)
        return FiniteStructure.from_json(src)
    except (OSError, KeyError, ValueError, TypeError) as e:
        raise ScenarioError(str(e), "backend.structure") from e


def make_measure(backend, kind: str) -> MeasureAssignment:
    if kind.startswith("pair:"):
        left, _, right = kind[5:].partition(",")
        return pair_measure(make_measure(backend, left), make_measure(backend, right))
    internal = "count" if kind == "counting" else kind
    if internal not in backend.kinds:
        raise ScenarioError(f"measure {kind!r} is not available on the {backend.name} backend "
                            f"(have: {', '.join(sorted(backend.kinds))})", "measure")
    return MeasureAssignment(backend, internal)


def load(path) -> Scenario:
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as e:
        raise ScenarioError(str(e), str(path)) from e
    except json.JSONDecodeError as e:
        raise ScenarioError(f"invalid JSON: {e}", str(path)) from e
    return from_dict(data, path)


def from_dict(data: dict, path: Path | None = None) -> Scenario:
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ScenarioError(f"expected schema_version {SCHEMA_VERSION}, got {version!r}", "schema_version")
    where = path.parent if path is not None else None
    if "backend" not in data:
        if any(data.get(k) for k in ("sets", "maps", "fiberings")):
            raise ScenarioError("missing backend", "backend")
        return Scenario(None, tasks=list(data.get("tasks", [])), raw=data, path=path)
    b = make_backend(data["backend"], where)
    sc = Scenario(b, raw=data, path=path)
    for name, item in data.get("sets", {}).items():
        sc.sets[name] = _element(f"sets.{name}", lambda: b.definable(item["formula"], int(item["arity"])))
    for name, item in data.get("maps", {}).items():
        def build(item=item):
            m, n = int(item["dom"]), int(item["cod"])
            f = DefinableMap(b.definable(item["graph"], m + n), m, n)
            b.validate_map(f)
            return f
        sc.maps[name] = _element(f"maps.{name}", build)
    for name, item in data.get("fiberings", {}).items():
        sc.fiberings[name] = _element(f"fiberings.{name}", lambda: Fibering.from_json(item, b))
    sc.tasks = list(data.get("tasks", []))
    return sc


def _element(where: str, build):
    try:
        return build()
    except KeyError as e:
        raise ScenarioError(f"missing field {e}", where) from e
    except (FubiniError, ValueError, TypeError) as e:
        raise ScenarioError(str(e), where) from e
