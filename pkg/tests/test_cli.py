import json
import subprocess
import sys

import pytest

from hecke2d.cli import main
from hecke2d.errors import ParseError
from hecke2d.jobs import parse_job_file, run_job, validate_job

E = {"basic": "unit", "A": [["1"]], "level": 0, "value": 1}


def run_cli(tmp_path, capsys, job, *extra, command="run"):
    path = tmp_path / "job.json"
    path.write_text(json.dumps(job) if not isinstance(job, str) else job)
    code = main([command, str(path), *extra])
    return code, capsys.readouterr().out


def test_measure_job(tmp_path, capsys):
    code, out = run_cli(tmp_path, capsys, {"op": "measure", "q": 2, "set": "dist(0; 2, 3)"})
    assert code == 0
    assert json.loads(out)["measure"] == "(1/8)*X^2"


def test_oracle_agrees_on_integral(tmp_path, capsys):
    job = {"op": "integrate", "q": 3, "space": "F", "function": [[2, "dist(0; 0, 0)"], [-1, "dist(0; 0, 1)"]]}
    code, engine = run_cli(tmp_path, capsys, job)
    code2, oracle = run_cli(tmp_path, capsys, job, command="oracle")
    assert code == code2 == 0
    assert json.loads(engine)["integral"] == json.loads(oracle)["integral"] == "5/3"


def test_oracle_rejects_cosets(tmp_path, capsys):
    code, out = run_cli(tmp_path, capsys, {"op": "measure", "q": 2, "set": "coset([[1]]; [[1]]; {[1]} @ 1)"},
                        command="oracle")
    assert code == 2
    assert json.loads(out)["error"] == "UnsupportedByOracle"


def test_integrate_over_gl1(tmp_path, capsys):
    code, out = run_cli(tmp_path, capsys, {"op": "integrate", "q": 2, "space": "GL_n", "function": E})
    assert code == 0 and json.loads(out)["integral"] == "1/2"


def test_convolve_and_table(tmp_path, capsys):
    code, out = run_cli(tmp_path, capsys, {"op": "convolve", "q": 2, "f1": E, "f2": E})
    assert code == 0
    assert [c for c, _ in json.loads(out)["product"]["atoms"]] == ["1/2"]
    code, out = run_cli(tmp_path, capsys, {"op": "hecke-table", "q": 2, "basis": [E]}, "--format", "csv")
    assert code == 0
    assert out.splitlines() == ["i,j,k,coefficient", "0,0,0,1/2"]


def test_stabilizer_and_bicoset_jobs(tmp_path, capsys):
    v = {"basic": "cong", "A": [["1"]], "Gamma": [[1]], "level": 1, "values": [["[0]", 1], ["[1]", 1]]}
    code, out = run_cli(tmp_path, capsys, {"op": "stabilizer", "q": 2, "vector": v})
    assert code == 0 and json.loads(out)["stabilizer"]["order"] == 2
    code, out = run_cli(tmp_path, capsys, {"op": "bicoset", "q": 2, "vector": v})
    doc = json.loads(out)
    assert code == 0 and len(doc["terms"]) == 1 and doc["terms"][0][1] == "1"


def test_batch_file_and_text_output(tmp_path, capsys):
    batch = {"version": 1, "q": 3, "jobs": [
        {"op": "measure", "set": "dist(0; 0, 1)"},
        {"op": "measure", "set": "dist(0; -1, 0) - dist(0; 0, 0)"},
    ]}
    code, out = run_cli(tmp_path, capsys, batch, "--format", "text")
    assert code == 0
    assert out.splitlines() == ["measure: 1/3", "op: measure", "q: 3", "", "measure: X^-1 - 1", "op: measure", "q: 3"]


def test_runs_are_deterministic(tmp_path, capsys):
    job = {"op": "verify", "suite": "products", "cases": 2, "params": {"points": 20}, "seed": 7}
    first = run_cli(tmp_path, capsys, job)
    assert first == run_cli(tmp_path, capsys, job)
    assert first[0] == 0


def test_verify_command(capsys):
    assert main(["verify", "convolution", "--cases", "4"]) == 0
    assert json.loads(capsys.readouterr().out)["ok"] is True
    assert main(["verify", "stabilizer-trivial", "--cases", "2"]) == 1
    capsys.readouterr()
    assert main(["verify", "no-such-suite"]) == 2


@pytest.mark.parametrize("job,code,fragment", [
    ("{not json", 2, "invalid JSON"),
    ({"op": "explode"}, 2, "unknown operation"),
    ({"op": "measure", "set": "dist(0; 0, 0)", "colour": 1}, 2, "colour"),
    ({"op": "measure", "set": "dist(0; 0 0)"}, 2, "position"),
    ({"op": "measure", "q": 6, "set": "dist(0; 0, 0)"}, 2, ""),
    ({"op": "stabilizer", "q": 2, "n": 2, "budget": 3, "vector": {"basic": "unit", "A": [["1", "0"], ["0", "1"]],
      "level": 1, "values": [["[1,0,0,1]", 1]]}}, 3, "BudgetExceeded"),
])
def test_error_exit_codes(tmp_path, capsys, job, code, fragment):
    got, out = run_cli(tmp_path, capsys, job)
    assert got == code
    assert fragment in out


def test_schema_reports_path():
    with pytest.raises(ParseError) as err:
        parse_job_file({"version": 1, "jobs": [{"op": "measure", "set": 5}]})
    assert "jobs/0/set" in str(err.value)


def test_job_spec_defaults():
    spec = validate_job({"op": "measure", "set": "dist(0; 0, 0)"})
    assert (spec.q, spec.n, spec.level) == (2, 1, 1)
    assert run_job(spec)["measure"] == "1"


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "hecke2d", "suites"], capture_output=True, text=True, check=True)
    assert "suites.double-coset:" in out.stdout
