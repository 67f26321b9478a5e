"""The eight acceptance criteria, each run from its checked-in fixture."""

import json
import time
from pathlib import Path

from fubini import suites
from fubini.engine.extend import extend
from fubini.scenario import load
from fubini.semiring import INT, TROP, make

FIXTURES = Path(__file__).resolve().parent.parent / "scenarios"


def suite_task(name):
    data = json.loads((FIXTURES / "acceptance" / name).read_text())
    (task,) = data["tasks"]
    kwargs = {}
    if "seed" in task:
        kwargs["seed"] = task["seed"]
    if "count" in task:
        kwargs[{"counting": "count", "axioms": "instances", "identities": "symbolic_cases",
                "qe": "formulas", "euler": "formulas", "calculus": "count"}[task["suite"]]] = task["count"]
    t = time.perf_counter()
    res = suites.SUITES[task["suite"]](**kwargs)
    return res, time.perf_counter() - t, data.get("limits", {}).get("seconds")


def test_c1_transseries(record):
    sc = load(FIXTURES / "transseries.json")
    F, X = sc.get("fiberings", "F"), sc.get("sets", "X")
    t = time.perf_counter()
    e = extend(X, F, sc.measure("euler")).value
    d = extend(X, F, sc.measure("dim")).value
    seconds = time.perf_counter() - t
    ok = e == make(INT, 3) and d == make(TROP, 2) and seconds < 1
    record(1, "transseries", ok, f"E = {e.payload}, dim = {d.payload}, {seconds:.2f} s (limit 1 s)")
    assert e == make(INT, 3)
    assert d == make(TROP, 2)
    assert seconds < 1


def test_c2_counting_oracle(record):
    res, seconds, limit = suite_task("c2_counting.json")
    ok = res.ok and res.cases >= 200 and seconds < limit
    record(2, "counting oracle", ok, f"{res.cases} fiberings, {len(res.failures)} mismatches, "
           f"depths {res.detail['by depth']}, {seconds:.1f} s (limit {limit} s)")
    assert res.ok, res.failures
    assert res.cases >= 200
    assert all(d > 0 for d in res.detail["by depth"])
    assert seconds < limit


def test_c3_axioms(record):
    res, seconds, _ = suite_task("c3_axioms.json")
    counts = {k: res.detail[k] for k in ("SEMILINEAR_EULER", "SEMILINEAR_DIM", "MORLEY_RANK")}
    ok = res.ok and res.detail["COUNTING exhaustive"] and min(counts.values()) >= 500
    record(3, "measure laws", ok, f"counting {res.detail['COUNTING']} checks (exhaustive), "
           + ", ".join(f"{k} {v}" for k, v in counts.items()) + f", {seconds:.1f} s")
    assert res.ok, res.failures
    assert res.detail["COUNTING exhaustive"]
    assert min(counts.values()) >= 500


def test_c4_identities(record):
    res, seconds, _ = suite_task("c4_identities.json")
    identities = ("additivity", "fiber sum", "composition", "witness independence", "uniqueness")
    symbolic = {k: res.detail[k].get("symbolic", 0) for k in identities}
    # composition closure is checked on the finite corpus only
    enough = all(v >= 200 for k, v in symbolic.items() if k != "composition")
    ok = res.ok and enough and all(res.detail[k]["cases"] > 0 for k in identities)
    record(4, "identities", ok, ", ".join(f"{k} {res.detail[k]['cases']}" for k in identities)
           + f", {seconds:.1f} s")
    assert res.ok, res.failures
    assert enough, symbolic
    assert all(res.detail[k]["cases"] > 0 for k in identities)


def test_c5_squaring_profile(record):
    res, _, _ = suite_task("c5_squaring.json")
    ok = res.ok and res.detail["mu(k)"] == 1
    record(5, "squaring profile", ok, f"mu(k) = {res.detail['mu(k)']}, {res.detail['identity']}")
    assert res.ok, res.failures
    assert res.detail["mu(k)"] == 1


def test_c6_qe_soundness(record):
    res, seconds, limit = suite_task("c6_qe.json")
    ok = res.ok and res.cases >= 100 and res.detail["points"] >= 100 * 10_000 and seconds < limit
    record(6, "qe soundness", ok, f"{res.cases} formulas, {res.detail.get('points', 0)} points, "
           f"{len(res.failures)} disagreements, {seconds:.1f} s (limit {limit} s)")
    assert res.ok, res.failures
    assert res.cases >= 100
    assert res.detail["points"] >= 100 * 10_000
    assert seconds < limit


def test_c7_euler_invariance(record):
    res, seconds, _ = suite_task("c7_euler.json")
    record(7, "euler invariance", res.ok, f"{res.cases} formulas, {len(res.failures)} differences, "
           f"{seconds:.1f} s")
    assert res.ok, res.failures


def test_c8_fibering_calculus(record):
    res, seconds, _ = suite_task("c8_calculus.json")
    record(8, "fibering calculus", res.ok, f"{res.cases} round trips and combines, "
           f"{len(res.failures)} failures, {seconds:.1f} s")
    assert res.ok, res.failures
