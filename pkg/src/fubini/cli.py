"""Command-line front end.

JSON on stdout is the contract: keys are sorted and timings are left out
unless ``--timings`` is given, so a fixed (input, seed, flags) always prints
the same bytes.  ``--format table`` is for people.

Exit status: 0 success, 1 a check failed (the report holds the
counterexample), 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import suites
from .discrete import FiniteBackend, PureSetBackend
from .engine.assignment import MeasureAssignment
from .engine.audit import (check_fubini, check_uniqueness, check_witness_independence,
                           finite_corpus, generate_corpus)
from .engine.extend import extend
from .engine.levels import level_sets
from .errors import Counterexample, FubiniError, ScenarioError
from .logic.printer import pretty
from .logic.sets import DefinableMap, DefinableSet
from .logic.syntax import free_vars, position
from .scenario import MEASURES, SCHEMA_VERSION, load, load_structure, make_measure
from .semilinear import SemilinearBackend, sample_equiv
from .semiring import MismatchedSemiring, json_payload

THEORIES = ("semilinear", "pureset", "finite")
DEFAULT_MEASURE = {"semilinear": "euler", "pureset": "morley", "finite": "counting"}

# oracle names accepted by ``oracle --suite`` next to the suite names
ORACLES = {"enumeration": "counting", "cell-alternating-sum": "euler", "sample-equiv": "qe"}
SUITE_SIZE = {"counting": "count", "axioms": "instances", "identities": "symbolic_cases",
              "qe": "formulas", "euler": "formulas", "calculus": "count"}


class CheckFailed(Exception):
    def __init__(self, report: dict):
        super().__init__("check failed")
        self.report = report


class InputError(Exception):
    pass


# ------------------------------------------------------------------ context


class Context:
    """Backend, measure and scenario resolved from the common flags."""

    def __init__(self, args):
        self.args = args
        self.scenario = load(args.scenario) if args.scenario else None
        self._backend = None

    @property
    def backend(self):
        if self._backend is None:
            self._backend = self._make_backend()
        return self._backend

    def _make_backend(self):
        a = self.args
        if self.scenario is not None and self.scenario.backend is not None:
            return self.scenario.backend
        theory = self.theory()
        if theory == "semilinear":
            return SemilinearBackend(base=a.base)
        if theory == "pureset":
            return PureSetBackend()
        if not a.structure:
            raise InputError("the finite backend needs --structure FILE")
        return FiniteBackend(load_structure(a.structure))

    def theory(self) -> str:
        kind = self.args.backend
        if kind is None:
            kind = self.args.measure or "semilinear"
        kind = kind.split(":")[0]
        if kind in THEORIES:
            return kind
        if kind in MEASURES:
            return MEASURES[kind]
        raise InputError(f"unknown backend or measure {kind!r}; use one of "
                         f"{', '.join(THEORIES + tuple(sorted(MEASURES)))}")

    def measure_kind(self, flag: str | None = None) -> str:
        a = self.args
        kind = flag or a.measure
        if kind is None and a.backend and a.backend not in THEORIES:
            kind = a.backend
        return kind or DEFAULT_MEASURE[self.backend_theory()]

    def backend_theory(self) -> str:
        b = self.backend
        if isinstance(b, SemilinearBackend):
            return "semilinear"
        return "pureset" if isinstance(b, PureSetBackend) else "finite"

    def measure(self, flag: str | None = None) -> MeasureAssignment:
        return make_measure(self.backend, self.measure_kind(flag))

    def need_seed(self, what: str) -> int:
        if self.args.seed is None:
            raise InputError(f"{what} samples; pass --seed")
        return self.args.seed

    def formula_set(self) -> DefinableSet:
        a = self.args
        if a.set:
            return self._named("sets", a.set)
        if a.formula is None:
            raise InputError("pass --formula or --set")
        phi = self.backend.parse(a.formula)
        arity = a.arity if a.arity is not None else _arity(phi)
        return DefinableSet(self.backend.sig, arity, phi)

    def _named(self, kind: str, name: str | None):
        if self.scenario is None:
            raise InputError(f"--{kind[:-1]} needs --scenario")
        return self.scenario.get(kind, name or self.scenario.only(kind))

    def fibering(self, name: str | None):
        return self._named("fiberings", name)

    def map(self, name: str | None):
        return self._named("maps", name)


def _arity(phi) -> int:
    return max((position(v) or 0 for v in free_vars(phi)), default=0)


# ---------------------------------------------------------------- commands


def cmd_qe(ctx: Context) -> dict:
    X = ctx.formula_set()
    b = ctx.backend
    out = b.qe(X.phi)
    rep = {"formula": pretty(X.phi), "qe": pretty(out), "arity": X.arity}
    if ctx.args.trials:
        if not isinstance(b, SemilinearBackend):
            raise InputError("--trials checks by rational sampling; semilinear only")
        seed = ctx.need_seed("checking qe output")
        try:
            s = sample_equiv(X.phi, out, ctx.args.trials, seed, base=b.base)
        except Counterexample as e:
            rep.update(status="diff", counterexample=e.witness)
            raise CheckFailed(rep) from e
        rep.update(status="equal", points=s.trials, seed=seed)
    return rep


def cmd_measure(ctx: Context) -> dict:
    X = ctx.formula_set()
    mu = ctx.measure()
    v = mu.measure(X.phi, X.arity)
    return {"value": json_payload(v), "semiring": str(v.id), "measure": mu.name,
            "formula": pretty(X.phi), "arity": X.arity}


def cmd_extend(ctx: Context) -> dict:
    F = ctx.fibering(ctx.args.fibering)
    X = ctx._named("sets", ctx.args.set) if ctx.args.set else None
    mu = ctx.measure()
    rep = extend(X, F, mu, ctx.args.seed).to_json()
    rep["measure"] = mu.name
    return rep


def cmd_levels(ctx: Context) -> dict:
    a = ctx.args
    if a.graph is not None:
        if a.dom is None or a.cod is None:
            raise InputError("--graph needs --dom and --cod")
        b = ctx.backend
        f = DefinableMap(DefinableSet(b.sig, a.dom + a.cod, b.parse(a.graph)), a.dom, a.cod)
        b.validate_map(f)
    else:
        f = ctx.map(a.map)
    mu = ctx.measure()
    rep = level_sets(f, mu).to_json()
    rep["measure"] = mu.name
    return rep


def cmd_check_axioms(ctx: Context) -> dict:
    mu = ctx.measure()
    b = mu.backend
    if b.symbolic:
        seed = ctx.need_seed("the axiom check on a symbolic backend")
        n = ctx.args.count or 20
        corpus = generate_corpus(mu, seed, sets=n, maps=n, max_arity=ctx.args.max_arity)
        scope = "sampled"
    else:
        corpus = finite_corpus(b, seed=ctx.args.seed or 0)
        if not corpus["exhaustive"]:
            ctx.need_seed("the axiom check on this structure")
        scope = "exhaustive" if corpus["exhaustive"] else "sampled"
        seed = ctx.args.seed or 0
    rep = check_fubini(mu, corpus, seed)
    out = dict(rep.to_json(), scope=scope, seed=seed)
    if not rep.ok:
        raise CheckFailed(out)
    return out


def cmd_check_witness(ctx: Context) -> dict:
    a = ctx.args
    F, G = ctx.fibering(a.first), ctx.fibering(a.second)
    X = ctx._named("sets", a.set) if a.set else F.base
    r = check_witness_independence(X, F, G, ctx.measure(), a.seed)
    out = r.to_json()
    if not r.ok:
        raise CheckFailed(out)
    return out


def cmd_check_unique(ctx: Context) -> dict:
    a = ctx.args
    if not a.other:
        raise InputError("check-unique needs --other MEASURE")
    mu, nu = ctx.measure(), ctx.measure(a.other)
    corpus = None
    if ctx.backend.symbolic:
        seed = ctx.need_seed("the uniqueness check on a symbolic backend")
    else:
        seed = a.seed or 0
        corpus = {}
        for X in finite_corpus(ctx.backend, seed=seed)["sets"]:
            corpus.setdefault(X.arity, []).append(X)
    try:
        r = check_uniqueness(mu, nu, a.max_arity, corpus, seed, samples=a.count or 20)
    except MismatchedSemiring as e:
        raise InputError(str(e)) from e
    out = dict(r.to_json(), measures=[mu.name, nu.name])
    if not r.ok:
        raise CheckFailed(out)
    return out


def cmd_oracle(ctx: Context) -> dict:
    a = ctx.args
    if a.suite:
        name = ORACLES.get(a.suite, a.suite)
        if name not in suites.SUITES:
            raise InputError(f"unknown suite {a.suite!r}; use one of "
                             f"{', '.join(sorted(set(suites.SUITES) | set(ORACLES)))}")
        results = [_run_suite(ctx, name, a.seed, a.count)]
    elif ctx.scenario is not None:
        results = [_run_task(ctx, i, t) for i, t in enumerate(ctx.scenario.tasks)]
        if not results:
            raise ScenarioError("scenario has no tasks", "tasks")
    else:
        raise InputError("oracle needs --suite or --scenario")
    ok = all(r["status"] in ("pass", "equal") for r in results)
    out = {"status": "equal" if ok else "diff", "results": results}
    if not ok:
        raise CheckFailed(out)
    return out


def _run_suite(ctx: Context, name: str, seed, count) -> dict:
    fn = suites.SUITES[name]
    kwargs = {}
    if name in SUITE_SIZE:
        if seed is None:
            raise InputError(f"suite {name!r} samples; pass --seed")
        kwargs["seed"] = seed
        if count:
            kwargs[SUITE_SIZE[name]] = count
    rep = fn(**kwargs).to_json()
    if not ctx.args.timings:
        rep.pop("seconds")
    return rep


def _run_task(ctx: Context, i: int, task: dict) -> dict:
    where = f"tasks[{i}]"
    try:
        return _task(ctx, task, where)
    except KeyError as e:
        raise ScenarioError(f"missing field {e}", where) from e


def _task(ctx: Context, task: dict, where: str) -> dict:
    sc = ctx.scenario
    command = task.get("command")
    seed = task.get("seed")
    if command == "suite":
        return dict(_run_suite(ctx, task["suite"], seed, task.get("count")), task=where)
    if command == "extend":
        F = sc.get("fiberings", task["fibering"])
        X = sc.get("sets", task["set"]) if "set" in task else None
        mu = sc.measure(task.get("measure", "euler"))
        got = json_payload(extend(X, F, mu, seed).value)
        return _compare(where, command, task, got, mu.name)
    if command != "oracle":
        raise ScenarioError(f"unknown command {command!r}; use extend, oracle or suite", where)
    oracle = task.get("oracle")
    if oracle == "enumeration":
        F = sc.get("fiberings", task["fibering"])
        b = sc.backend
        if not isinstance(b, FiniteBackend):
            raise ScenarioError("enumeration needs a finite backend", where)
        got = json_payload(extend(F.base, F, sc.measure("counting"), seed).value)
        return _pair(where, oracle, got, len(b.enumerate(F.base.phi, F.m)))
    if oracle == "cell-alternating-sum":
        X = sc.get("sets", task["set"])
        b = sc.backend
        if not isinstance(b, SemilinearBackend):
            raise ScenarioError("cell-alternating-sum needs the semilinear backend", where)
        cells = b.decompose(X.phi, X.arity, reverse=True).cells
        return _pair(where, oracle, sc.measure("euler").measure(X.phi, X.arity).payload,
                     sum((-1) ** c.dim for c in cells))
    if oracle == "sample-equiv":
        if seed is None:
            raise ScenarioError("sample-equiv samples; give the task a seed", where)
        b = sc.backend
        phi = b.parse(task["formula"])
        out = b.qe(phi)
        other = b.parse(task["candidate"]) if "candidate" in task else phi
        rep = {"task": where, "oracle": oracle, "qe": pretty(out), "against": pretty(other),
               "seed": seed}
        try:
            sample_equiv(out, other, int(task.get("trials", 10000)), seed, base=b.base)
        except Counterexample as e:
            return dict(rep, status="diff", counterexample=e.witness)
        return dict(rep, status="equal")
    raise ScenarioError(f"unknown oracle {oracle!r}; use enumeration, cell-alternating-sum "
                        "or sample-equiv", where)


def _compare(where, command, task, got, measure) -> dict:
    rep = {"task": where, "command": command, "measure": measure, "value": got}
    if "expect" in task:
        rep["expect"] = task["expect"]
        rep["status"] = "equal" if got == task["expect"] else "diff"
    else:
        rep["status"] = "equal"
    return rep


def _pair(where, oracle, engine, reference) -> dict:
    return {"task": where, "oracle": oracle, "engine": engine, "reference": reference,
            "status": "equal" if engine == reference else "diff"}


COMMANDS = {"qe": cmd_qe, "measure": cmd_measure, "extend": cmd_extend, "levels": cmd_levels,
            "check-axioms": cmd_check_axioms, "check-witness": cmd_check_witness,
            "check-unique": cmd_check_unique, "oracle": cmd_oracle}


# ------------------------------------------------------------------ output


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, sort_keys=True)
    return "\n".join(_table(report))


def _table(obj, indent: str = ""):
    rows = [(k, v) for k, v in obj.items() if not isinstance(v, list) or not v or
            not all(isinstance(x, dict) for x in v)]
    width = max((len(k) for k, _ in rows), default=0)
    for k, v in rows:
        text = v if isinstance(v, str) else json.dumps(v, sort_keys=True)
        yield f"{indent}{k.ljust(width)}  {text}"
    for k, v in obj.items():
        if isinstance(v, list) and v and all(isinstance(x, dict) for x in v):
            yield f"{indent}{k}:"
            cols = sorted({c for x in v for c in x})
            cells = [[c for c in cols]] + [[_cell(x.get(c)) for c in cols] for x in v]
            widths = [max(len(r[i]) for r in cells) for i in range(len(cols))]
            for r in cells:
                yield indent + "  " + "  ".join(s.ljust(w) for s, w in zip(r, widths)).rstrip()


def _cell(v) -> str:
    if v is None:
        return ""
    return v if isinstance(v, str) else json.dumps(v, sort_keys=True)


# ----------------------------------------------------------------- parsing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("--seed", type=int, help="required by every sampled operation")
    common.add_argument("--scenario", type=Path, help="scenario file (JSON)")
    common.add_argument("--backend", metavar="KIND",
                        help="theory (semilinear, pureset, finite) or a measure that selects one")
    common.add_argument("--structure", help="finite structure file")
    common.add_argument("--base", help="semilinear base set C as a formula in x1")
    common.add_argument("--measure", help="euler, dim, counting, morley, pure_euler or pair:A,B")
    common.add_argument("--timings", action="store_true", help="include run times in reports")

    p = argparse.ArgumentParser(prog="fubini", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_)

    for name, help_ in (("qe", "eliminate quantifiers"), ("measure", "measure a definable set")):
        s = add(name, help_)
        s.add_argument("--formula")
        s.add_argument("--set", help="named set from the scenario")
        s.add_argument("--arity", type=int, help="defaults to the largest free xi")
        if name == "qe":
            s.add_argument("--trials", type=int, default=0,
                           help="check the output on this many seeded points")
    s = add("extend", "measure a set along a fibering")
    s.add_argument("--fibering")
    s.add_argument("--set")
    s = add("levels", "level sets of the fiber measure along a map")
    s.add_argument("--map")
    s.add_argument("--graph", help="map graph over x1..x(dom+cod)")
    s.add_argument("--dom", type=int)
    s.add_argument("--cod", type=int)
    s = add("check-axioms", "check the measure laws")
    s.add_argument("--count", type=int, help="sets and maps drawn on symbolic backends")
    s.add_argument("--max-arity", type=int, default=2)
    s = add("check-witness", "extend along two fiberings and compare")
    s.add_argument("--first", required=True)
    s.add_argument("--second", required=True)
    s.add_argument("--set")
    s = add("check-unique", "compare two measures arity by arity")
    s.add_argument("--other", help="second measure")
    s.add_argument("--max-arity", type=int, default=2)
    s.add_argument("--count", type=int, help="sets per arity on symbolic backends")
    s = add("oracle", "run an oracle suite or the tasks of a scenario")
    s.add_argument("--suite", help="enumeration, cell-alternating-sum, sample-equiv, "
                   + ", ".join(sorted(suites.SUITES)))
    s.add_argument("--count", type=int, help="suite size")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        ctx = Context(args)
        report = COMMANDS[args.command](ctx)
        code = 0
    except CheckFailed as e:
        report, code = e.report, 1
    except (InputError, FubiniError, ValueError) as e:
        err = {"error": str(e)}
        if isinstance(e, FubiniError) and e.witness:
            err["detail"] = e.witness
        print(f"fubini {args.command}: {json.dumps(err, sort_keys=True, default=str)}", file=sys.stderr)
        return 2
    report = {"schema_version": SCHEMA_VERSION, "command": args.command, **report}
    print(render(report, args.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
