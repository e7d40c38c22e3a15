import json
import subprocess
import sys
from importlib.resources import files
from pathlib import Path

import pytest

from robustnet.cli import main
from robustnet.formats import parse_instance, parse_solution

GOLDEN = Path(__file__).parent / "golden"
DATA = files("robustnet").joinpath("data")
SAT3 = str(DATA / "sat3.cnf")
UNSAT = str(DATA / "unsat8.cnf")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("family,golden", [("path", "sat3_path.inst"), ("cut", "sat3_cut.inst")])
def test_reduce_matches_golden(capsys, family, golden):
    code, out, err = run(capsys, "reduce", "--cnf", SAT3, "--family", family, "--levels", "0")
    assert code == 0
    assert out == (GOLDEN / golden).read_text()
    assert "scenarios" in err


def test_reduce_level1_to_file(capsys, tmp_path):
    dest = tmp_path / "l1.inst"
    code, out, _ = run(capsys, "reduce", "--cnf", SAT3, "--family", "path", "--levels", "1", "--out", str(dest))
    assert code == 0 and out == ""
    text = dest.read_text()
    assert "# expected_gap: 4" in text
    inst = parse_instance(text)
    assert (inst.edge_count, inst.scenario_count) == (400, 216)


def test_reduce_level2_refused(capsys):
    code, out, err = run(capsys, "reduce", "--cnf", SAT3, "--family", "path", "--levels", "2")
    assert code == 1 and out == "" and "refused" in err


def test_solve_objectives(capsys):
    inst = str(GOLDEN / "sat3_path.inst")
    for objective in ("minmax", "regret"):
        code, out, err = run(capsys, "solve", "--instance", inst, "--objective", objective)
        assert code == 0 and "method: pareto_dp" in err
        assert parse_solution(out)[0] == 1
    code, out, err = run(capsys, "solve", "--instance", inst, "--objective", "mean")
    value, sol = parse_solution(out)
    assert code == 0 and 1 <= value <= 6 and len(sol) == 8
    code, out, err = run(capsys, "solve", "--instance", inst, "--method", "brute")
    assert "method: brute" in err


def test_solve_refuses_over_limit(capsys):
    code, out, err = run(capsys, "solve", "--instance", str(GOLDEN / "sat3_path.inst"), "--method", "brute", "--limit", "5")
    assert code == 1 and out == ""


def test_to_tree(capsys, tmp_path):
    sol = tmp_path / "p.sol"
    inst = str(GOLDEN / "sat3_path.inst")
    assert run(capsys, "solve", "--instance", inst, "--out", str(sol))[1] == "1\n"
    tree, tsol = tmp_path / "t.inst", tmp_path / "t.sol"
    code, out, _ = run(
        capsys, "reduce", "--to-tree", "--instance", inst, "--solution", str(sol),
        "--out", str(tree), "--solution-out", str(tsol),
    )
    assert code == 0 and out == ""
    value, T = parse_solution(tsol.read_text())
    assert value == 1 and len(T) == 14
    code, out, _ = run(capsys, "solve", "--instance", str(tree))
    assert parse_solution(out)[0] == 1
    assert run(capsys, "reduce", "--to-tree", "--instance", inst, "--solution", str(sol))[0] == 2


def test_verify_exit_codes(capsys):
    code, out, _ = run(capsys, "verify", "--cnf", SAT3, "--family", "path", "--levels", "1")
    assert code == 0 and "PASS" in out and "exact bound: value = 1" in out
    code, out, _ = run(capsys, "verify", "--cnf", UNSAT, "--family", "path", "--levels", "1")
    assert code == 0 and "lower bound: value >= 4" in out


def test_verify_csv_jobs_deterministic(capsys):
    args = ["verify", "--cnf", SAT3, UNSAT, "--family", "path", "cut", "--levels", "0", "--format", "csv"]
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args, "--jobs", "2")
    assert code1 == code2 == 0 and out1 == out2
    assert out1.splitlines()[0].startswith("family,n_vars")
    assert len(out1.splitlines()) == 5


def test_regret_identity(capsys):
    code, out, _ = run(capsys, "verify", "--regret-identity", "--instance", str(GOLDEN / "sat3_cut.inst"))
    assert code == 0 and "holds" in out


def test_regret_identity_not_applicable(capsys, tmp_path):
    p = tmp_path / "x.inst"
    p.write_text("ROBUSTNET 1\nproblem path\ndirected 1\nnodes 2\nsource 0\nsink 1\nedges 1\ne 0 0 1\nscenarios 1\ns 1 0 3\nend\n")
    code, out, _ = run(capsys, "verify", "--regret-identity", "--instance", str(p))
    assert code == 3 and "not applicable" in out and "scenario 0" in out


def test_bench(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"families": ["path"], "sizes": [6], "scenario_counts": [3], "trials": 10}))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(capsys, "bench", "--config", str(cfg), "--seed", "4", "--out", str(a))[0] == 0
    assert run(capsys, "bench", "--config", str(cfg), "--seed", "4", "--out", str(b), "--jobs", "2")[0] == 0
    assert a.read_bytes() == b.read_bytes()
    cfg.write_text("{not json")
    assert run(capsys, "bench", "--config", str(cfg))[0] == 2


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["solve"],
        ["solve", "--instance", "/nonexistent"],
        ["reduce", "--family", "path"],
        ["reduce", "--cnf", SAT3, "--family", "path", "--levels", "-1"],
        ["verify", "--family", "path"],
        ["bench", "--config", "/nonexistent", "--jobs", "0"],
    ],
)
def test_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2 and out == "" and err


def test_parse_error_goes_to_stderr(capsys, tmp_path):
    p = tmp_path / "bad.inst"
    p.write_text("ROBUSTNET 1\nproblem path\nscenarios -1\n")
    code, out, err = run(capsys, "solve", "--instance", str(p))
    assert code == 2 and out == "" and "input error" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "robustnet", "reduce", "--cnf", SAT3, "--family", "cut"],
        capture_output=True, text=True, check=True,
    )
    assert proc.stdout == (GOLDEN / "sat3_cut.inst").read_text()
