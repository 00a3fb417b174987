from __future__ import annotations

import json
import subprocess
import sys

import jsonschema
import pytest

from lenscoh import cli


def run_json(capsys, *argv):
    report, code = cli.run([*argv, "--json"])
    out = capsys.readouterr().out
    assert json.loads(out) == report
    jsonschema.validate(report, cli.REPORT_SCHEMA)
    return report, code, out


def test_lens_orbit_space_case(capsys):
    report, code, _ = run_json(capsys, "lens", "--p", "3", "--m", "3", "--n", "9")
    assert code == 0
    res = report["results"]
    assert res["dims"][:6] == [1] * 6 and not any(res["dims"][6:])
    assert res["beta_x_is"] == "0"
    assert res["certificates"]
    assert res["presentation"] == "Z_3[x,z]/<x^2,z^3>"


def test_lens_prime_order_bockstein(capsys):
    report, code, _ = run_json(capsys, "lens", "--p", "3", "--m", "2", "--n", "3")
    assert code == 0 and report["results"]["beta_x_is"] == "z"


def test_lens_coprime_order_and_dump(capsys):
    report, code, _ = run_json(capsys, "lens", "--p", "3", "--m", "2", "--n", "4", "--dump-complex")
    assert code == 0
    assert report["results"]["ring"] is None
    assert report["results"]["dims"][:4] == [1, 0, 0, 1]
    assert "complex" in report["results"]


def test_max_degree_controls_length(capsys):
    report, _, _ = run_json(capsys, "lens", "--p", "5", "--m", "2", "--n", "25", "--max-degree", "6")
    assert len(report["results"]["dims"]) == 7
    assert report["params"]["max_degree"] == 6


def test_orbit_matches_and_is_independent_of_weights(capsys):
    a, code_a, _ = run_json(capsys, "orbit", "--p", "3", "--m", "3")
    b, code_b, _ = run_json(capsys, "orbit", "--p", "3", "--m", "3", "--q", "1,2,1")
    assert code_a == code_b == 0
    assert a["results"]["verdict"] == b["results"]["verdict"] == "MATCH"
    assert a["results"]["borel_dims"] == b["results"]["borel_dims"]


def test_orbit_mismatch_exit_code(capsys, monkeypatch):
    monkeypatch.setattr(cli, "borel_cohomology_dims", lambda W, C, p, D: [0] * (D + 1))
    report, code = cli.run(["orbit", "--p", "3", "--m", "2"])
    capsys.readouterr()
    assert code == 1 and report["results"]["verdict"] == "MISMATCH"


@pytest.mark.parametrize("command", ["ss", "ss-run"])
def test_ss_branch(capsys, command):
    report, code, _ = run_json(capsys, command, "--p", "3", "--m", "3", "--branch", "case2")
    assert code == 0
    (branch,) = report["results"]["branches"]
    assert branch["classification"] == "CONSISTENT-AND-VANISHING"
    assert branch["tot_ring"]["case"] == "ii"


def test_ss_explore(capsys):
    report, code, _ = run_json(capsys, "ss-explore", "--p", "3", "--m", "4")
    assert code == 0
    assert report["results"]["admissible"] == ["case2"]
    rep2, _, _ = run_json(capsys, "ss", "--p", "3", "--m", "4", "--explore")
    assert rep2["results"] == report["results"]


@pytest.mark.parametrize("m,admissible", [(3, ["case2", "case1"]), (4, ["case2"]), (6, ["case2", "case1"])])
def test_verify_certifies(capsys, m, admissible):
    report, code, _ = run_json(capsys, "verify", "--p", "3", "--m", str(m))
    assert code == 0
    assert report["results"]["verdict"] == "CERTIFIED"
    assert report["results"]["admissible"] == admissible


def test_verify_outside_theorem_scope(capsys):
    report, code, _ = run_json(capsys, "verify", "--p", "3", "--m", "9")
    assert code == 0 and report["results"]["verdict"] == "OUT OF THEOREM SCOPE"


@pytest.mark.parametrize(
    "argv",
    [
        ["lens", "--p", "4", "--m", "3", "--n", "9"],
        ["lens", "--p", "3", "--m", "1", "--n", "9"],
        ["lens", "--p", "3", "--m", "2", "--n", "9", "--q", "1,3"],
        ["ss", "--p", "3", "--m", "3"],
        ["verify", "--p", "9", "--m", "3"],
        ["lens", "--p", "3"],
        ["nonsense"],
    ],
)
def test_usage_errors_exit_2(capsys, argv):
    _, code = cli.run(argv)
    capsys.readouterr()
    assert code == 2


def test_reports_are_deterministic(capsys):
    outs = [run_json(capsys, "verify", "--p", "3", "--m", "6")[2] for _ in range(2)]
    assert outs[0] == outs[1]
    timed, _ = cli.run(["verify", "--p", "3", "--m", "3", "--json", "--timing"])
    capsys.readouterr()
    assert timed["wall_time_s"] >= 0
    jsonschema.validate(timed, cli.REPORT_SCHEMA)


def test_text_rendering(capsys):
    cli.run(["lens", "--p", "3", "--m", "3", "--n", "9"])
    out = capsys.readouterr().out
    assert "x*z^2" in out


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "lenscoh", "orbit", "--p", "3", "--m", "2"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and "MATCH" in proc.stdout
