import json
import subprocess
import sys
from pathlib import Path

import pytest

from birmaps import __version__
from birmaps.cli import COMMANDS, main, run_job

JOBS = Path(__file__).resolve().parent.parent / "jobs"

EXPECTED = {
    "check-regular-conic": 0,
    "check-regular-quadric": 1,
    "check-birational-conic": 0,
    "check-birational-line": 0,
    "check-dominant-line": 0,
    "check-dominant-plane": 1,
    "check-embedding-line": 0,
    "check-embedding-parabola": 0,
    "check-embedding-cusp": 1,
    "check-iso-line": 0,
    "build-dominance-conic": 0,
    "certify-square": 0,
    "certify-refuted": 1,
    "groebner-twisted-cubic": 0,
    "malformed": 3,
}


def load(name):
    return json.loads((JOBS / f"{name}.json").read_text())


@pytest.mark.parametrize("name, code", sorted(EXPECTED.items()))
def test_example_jobs(name, code):
    rep = run_job(load(name))
    assert rep["exit_code"] == code
    assert {"yes": 0, "no": 1, "inconclusive": 2, "error": 3}[rep["verdict"]] == code
    assert rep["schema"] == 1 and rep["tool"] == f"birmaps {__version__}"
    json.dumps(rep)


def test_every_subcommand_has_an_example():
    used = {json.loads(p.read_text()).get("command") for p in JOBS.glob("*.json") if p.name not in ("witness-line.json", "expected.json")}
    assert used == set(COMMANDS)


def test_malformed_polynomial_reports_position():
    rep = run_job(load("malformed"))
    assert "position 11" in rep["evidence"]["error"]


@pytest.mark.parametrize(
    "job",
    [
        {"command": "check-regular"},
        {"schema": 2, "command": "check-regular"},
        {"schema": 1, "command": "frobnicate"},
        {"schema": 1, "command": "certify", "source": {"variables": ["x"], "equations": ["x"]}},
        {"schema": 1, "command": "groebner", "field": "fp:9", "source": {"variables": ["x"], "equations": ["x"]}},
        {"schema": 1, "command": "groebner", "source": {"variables": ["x"], "equations": ["y"]}},
        {"schema": 1, "command": "groebner", "source": {"variables": ["x"], "equations": ["x"]}, "order": "weird"},
    ],
)
def test_input_errors_exit_3(job):
    assert run_job(job)["exit_code"] == 3


def test_command_line_must_match_job():
    assert run_job(load("certify-square"), command="groebner")["exit_code"] == 3


def test_budget_flag_gives_inconclusive(tmp_path, capsys):
    code = main(["--job", str(JOBS / "check-regular-quadric.json"), "--budget-spairs", "2"])
    rep = json.loads(capsys.readouterr().out)
    assert code == 2 and rep["verdict"] == "inconclusive"
    assert rep["caps"]["budget_spairs"] == 2


def test_build_system_solve_is_inconclusive():
    rep = run_job(load("build-system-solve"))
    assert rep["exit_code"] == 2
    assert rep["evidence"]["S"]["toy_solve"]["status"] == "inconclusive"


def test_verify_witness_job_and_tampering(tmp_path):
    job = load("verify-witness-line")
    job["witness_file"] = str(JOBS / job["witness_file"])
    assert run_job(job)["exit_code"] == 0
    w = json.loads((JOBS / "witness-line.json").read_text())
    name = next(k for k, v in sorted(w["values"].items()) if k.startswith("c_M_") and v != "0")
    w["values"][name] = str(int(w["values"][name].split("/")[0]) + 7)
    del job["witness_file"]
    job["witness"] = w
    rep = run_job(job)
    assert rep["exit_code"] == 1 and rep["evidence"]["violated"]


def test_field_override_and_report_to_file(tmp_path):
    out = tmp_path / "r.json"
    code = main(["groebner", "--job", str(JOBS / "groebner-twisted-cubic.json"), "--field", "fp:101", "--out", str(out)])
    assert code == 0
    assert json.loads(out.read_text())["evidence"]["basis"][-1] == "x^3 + 100*y^2"


def test_batch_exit_is_maximum(capsys):
    code = main(["--jobs", "2", "--job", str(JOBS / "certify-square.json"), "--job", str(JOBS / "malformed.json")])
    reps = json.loads(capsys.readouterr().out)
    assert code == 3 and [r["exit_code"] for r in reps] == [0, 3]


def test_subprocess_determinism(tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        proc = subprocess.run(
            [sys.executable, "-m", "birmaps", "--job", str(JOBS / "check-birational-conic.json"), "--out", str(out)],
            capture_output=True,
        )
        assert proc.returncode == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
