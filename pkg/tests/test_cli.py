import json
import subprocess
import sys
from pathlib import Path

import pytest

from fubini.cli import main
from fubini.errors import ScenarioError
from fubini.scenario import from_dict, load

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, (json.loads(out) if out else None), err


def test_measure_open_interval(capsys):
    code, rep, _ = run_json(capsys, "measure", "--backend", "euler", "--formula", "0 < x1 & x1 < 1")
    assert code == 0
    assert rep["value"] == -1 and rep["schema_version"] == 1 and rep["semiring"] == "INT"


def test_measure_dim_and_pure_set(capsys):
    assert run_json(capsys, "measure", "--backend", "dim", "--formula", "x1 < x2")[1]["value"] == 2
    assert run_json(capsys, "measure", "--backend", "dim", "--formula", "false",
                    "--arity", "1")[1]["value"] == "neg_inf"
    assert run_json(capsys, "measure", "--backend", "morley", "--formula", "x1 != c0")[1]["value"] == 1


def test_extend_transseries(capsys):
    code, rep, _ = run_json(capsys, "extend", "--scenario", SCENARIOS / "transseries.json",
                            "--measure", "euler")
    assert code == 0 and rep["value"] == 3
    code, rep, _ = run_json(capsys, "extend", "--scenario", SCENARIOS / "transseries.json",
                            "--measure", "dim")
    assert code == 0 and rep["value"] == 2


def test_check_axioms_counting_m4(capsys):
    code, rep, _ = run_json(capsys, "check-axioms", "--backend", "counting",
                            "--structure", SCENARIOS / "m4.json")
    assert code == 0 and rep["ok"] and rep["scope"] == "exhaustive"
    assert all(r["status"] == "pass" for r in rep["results"])


def test_check_axioms_symbolic_needs_seed(capsys):
    code, out, err = run(capsys, "check-axioms", "--backend", "euler")
    assert code == 2 and out == "" and "--seed" in err
    code, rep, _ = run_json(capsys, "check-axioms", "--backend", "euler", "--seed", "1",
                            "--count", "3")
    assert code == 0 and rep["scope"] == "sampled"


def test_qe_with_check(capsys):
    code, rep, _ = run_json(capsys, "qe", "--formula", "E y (x1 < y & y < c1)", "--trials", "500",
                            "--seed", "2")
    assert code == 0 and rep["qe"] == "x1 < 1" and rep["status"] == "equal"
    code, _, err = run(capsys, "qe", "--formula", "E y (x1 < y)", "--trials", "10")
    assert code == 2 and "--seed" in err


def test_levels(capsys):
    code, rep, _ = run_json(capsys, "levels", "--graph", "x2 < x1 & x3 = x1", "--dom", "2",
                            "--cod", "1")
    assert code == 0
    assert [(c["a"], c["mu"]) for c in rep["classes"]] == [(-1, -1)]
    code, _, err = run(capsys, "levels", "--graph", "x2 = x1 | x2 = 0 - x1", "--dom", "1", "--cod", "1")
    assert code == 2 and "two outputs" in err


def test_check_witness(capsys):
    code, rep, _ = run_json(capsys, "check-witness", "--scenario", SCENARIOS / "transseries.json",
                            "--first", "F", "--second", "F")
    assert code == 0 and rep["status"] == "pass"


def test_check_unique(capsys):
    code, rep, _ = run_json(capsys, "check-unique", "--measure", "euler", "--other", "euler",
                            "--seed", "0", "--count", "4")
    assert code == 0 and rep["status"] == "pass"
    code, _, err = run(capsys, "check-unique", "--measure", "euler", "--other", "dim", "--seed", "0")
    assert code == 2 and "INT" in err
    code, rep, _ = run_json(capsys, "check-unique", "--backend", "counting", "--structure",
                            SCENARIOS / "m4.json", "--other", "counting")
    assert code == 0


def test_oracle_scenarios(capsys):
    code, rep, _ = run_json(capsys, "oracle", "--scenario", SCENARIOS / "transseries.json")
    assert code == 0 and rep["status"] == "equal"
    code, rep, _ = run_json(capsys, "oracle", "--scenario", SCENARIOS / "mismatch.json")
    assert code == 1 and rep["status"] == "diff"
    (res,) = rep["results"]
    assert res["counterexample"] == {"x1": res["counterexample"]["x2"], "x2": res["counterexample"]["x1"]}


def test_oracle_suites(capsys):
    code, rep, _ = run_json(capsys, "oracle", "--suite", "enumeration", "--seed", "0", "--count", "20")
    assert code == 0 and rep["results"][0]["cases"] == 20
    assert "seconds" not in rep["results"][0]
    code, rep, _ = run_json(capsys, "oracle", "--suite", "cell-alternating-sum", "--seed", "0",
                            "--count", "30")
    assert code == 0
    code, _, err = run(capsys, "oracle", "--suite", "enumeration")
    assert code == 2 and "--seed" in err
    code, _, err = run(capsys, "oracle", "--suite", "nope", "--seed", "0")
    assert code == 2


def test_identical_runs_print_identical_bytes(capsys):
    argv = ["oracle", "--suite", "sample-equiv", "--seed", "5", "--count", "5"]
    first = run(capsys, *argv)
    second = run(capsys, *argv)
    assert first == second
    argv = ["extend", "--scenario", SCENARIOS / "transseries.json", "--measure", "dim"]
    assert run(capsys, *argv) == run(capsys, *argv)


def test_table_format(capsys):
    code, out, _ = run(capsys, "check-axioms", "--backend", "counting", "--structure",
                       SCENARIOS / "m4.json", "--format", "table")
    assert code == 0
    assert "normalization" in out and "results:" in out


@pytest.mark.parametrize("argv, fragment", [
    (["measure", "--formula", "x1 < ("], "offset"),
    (["measure", "--backend", "nope", "--formula", "x1 < 0"], "unknown backend"),
    (["extend", "--scenario", SCENARIOS / "transseries.json", "--fibering", "G"], "fiberings.G"),
    (["extend", "--scenario", "missing.json"], "missing.json"),
    (["measure", "--backend", "counting", "--formula", "x1 = c0"], "--structure"),
    (["measure", "--backend", "finite", "--structure", SCENARIOS / "m4.json",
      "--measure", "euler", "--formula", "x1 = c0"], "not available"),
])
def test_input_errors_exit_2(capsys, argv, fragment):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == ""
    assert fragment in err


def test_scenario_errors_name_the_element(tmp_path):
    bad = {"schema_version": 1, "backend": {"theory": "semilinear"},
           "sets": {"X": {"arity": 1, "formula": "x1 <"}}}
    with pytest.raises(ScenarioError) as e:
        from_dict(bad)
    assert e.value.element == "sets.X"
    with pytest.raises(ScenarioError) as e:
        from_dict({"schema_version": 1, "backend": {"theory": "semilinear"},
                   "maps": {"f": {"dom": 1, "cod": 1, "graph": "x1 < x2"}}})
    assert e.value.element == "maps.f"
    with pytest.raises(ScenarioError) as e:
        from_dict({"schema_version": 2, "backend": {"theory": "semilinear"}})
    assert e.value.element == "schema_version"
    with pytest.raises(ScenarioError) as e:
        from_dict({"schema_version": 1, "backend": {"theory": "semilinear"},
                   "fiberings": {"F": {"r": 0, "m": 1}}})
    assert e.value.element == "fiberings.F"


def test_scenario_with_structure_file(tmp_path):
    (tmp_path / "s.json").write_text((SCENARIOS / "m4.json").read_text())
    path = tmp_path / "sc.json"
    path.write_text(json.dumps({
        "schema_version": 1, "backend": {"theory": "finite", "structure": "s.json"},
        "fiberings": {"F": {"r": 0, "m": 1, "m_list": [], "n_list": [1], "base": "P(x1)",
                            "maps": ["x2 = x1 & P(x1)"]}},
        "tasks": [{"command": "oracle", "oracle": "enumeration", "fibering": "F"},
                  {"command": "extend", "fibering": "F", "measure": "counting", "expect": 2}]}))
    sc = load(path)
    assert sc.only("fiberings") == "F"
    assert main(["oracle", "--scenario", str(path)]) == 0


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "fubini.cli", "measure", "--backend", "euler",
                          "--formula", "0 < x1 & x1 < 1"], capture_output=True, text=True)
    assert out.returncode == 0 and json.loads(out.stdout)["value"] == -1
