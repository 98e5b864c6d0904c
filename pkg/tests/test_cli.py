import json
import subprocess
import sys

import pytest

from stretchstab import __version__
from stretchstab.cli import main, parse_grid
from stretchstab.report import RunRecord, csv_text, fmt


@pytest.fixture
def spec_path(data_dir):
    return str(data_dir / "stretch_re1.spec.json")


@pytest.fixture
def req_path(data_dir):
    return str(data_dir / "assistive_tasks.req.json")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def write_spec(tmp_path, **changes):
    base = {"schema": "robotspec-v1", "m_r": 23.0, "w": 0.315, "l": 0.24, "c": 0.16,
            "t": 0.005, "D": 0.6925, "H": 1.125}
    base.update(changes)
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(base))
    return str(path)


def test_fmt():
    assert fmt(23.683905) == "23.6839"
    assert fmt(0.7) == "0.700000"
    assert fmt(1e-7) == "1.00000e-07"
    assert fmt(100000.0) == "100000"
    assert fmt(None) == "unbounded"
    assert fmt(-0.0) == "0.00000"


def test_csv_layout():
    text = csv_text(["a", "b"], [[1.0, "x,y"]])
    assert text == f'# tool-version: {__version__}\na,b\n1.00000,"x,y"\n'


def test_parse_grid():
    assert parse_grid("0:1:3") == (0.0, 0.5, 1.0)
    assert parse_grid("0.5,0.7") == (0.5, 0.7)


def test_validate_ok(capsys, spec_path):
    code, out, _ = run(capsys, "validate", spec_path)
    assert code == 0 and "valid" in out


def test_validate_bad_c(capsys, tmp_path):
    code, out, _ = run(capsys, "validate", write_spec(tmp_path, c=0.3))
    assert code == 1
    assert "c:" in out


def test_validate_missing_file(capsys, tmp_path):
    code, _, err = run(capsys, "validate", str(tmp_path / "nope.json"))
    assert code == 2 and "cannot read" in err


def test_validate_malformed(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"m_r": 23,\n "w": }')
    code, _, err = run(capsys, "validate", "--spec", str(path))
    assert code == 2 and "line 2" in err


def test_validate_unknown_key(capsys, tmp_path):
    code, _, err = run(capsys, "validate", write_spec(tmp_path, radius=0.1))
    assert code == 2 and "radius" in err


def test_analyze_payload(capsys, spec_path):
    code, out, _ = run(capsys, "analyze", "--spec", spec_path, "--kind", "payload")
    assert code == 0 and "3.47 kg" in out


def test_analyze_backpush(capsys, spec_path):
    code, out, _ = run(capsys, "analyze", spec_path, "--kind", "backpush", "--height", "1.0")
    assert code == 0 and "18.04 N" in out


def test_analyze_zero_height(capsys, spec_path):
    code, _, err = run(capsys, "analyze", spec_path, "--kind", "pull", "--height", "0")
    assert code == 1 and "unbounded at h=0" in err


def test_analyze_above_workspace(capsys, spec_path):
    code, _, err = run(capsys, "analyze", spec_path, "--kind", "pull", "--height", "1.2")
    assert code == 1 and "exceeds H" in err


def test_analyze_csv(capsys, spec_path):
    code, out, _ = run(capsys, "analyze", spec_path, "--kind", "pull", "--height", "1",
                       "--format", "csv")
    lines = out.splitlines()
    assert code == 0
    assert lines[1] == "kind,location,value"
    assert lines[2] == "pull,1.00000,23.6839"


def test_analyze_units_cm(capsys, spec_path):
    code, out, _ = run(capsys, "analyze", spec_path, "--kind", "pull", "--height", "0.7",
                       "--units", "cm")
    assert code == 0 and "70 cm" in out


def test_fk_ik(capsys, spec_path):
    code, out, _ = run(capsys, "fk", spec_path, "--q-a", "0.2", "--q-m", "0.1", "--q-l", "0.8",
                       "--format", "csv")
    assert code == 0 and out.splitlines()[-1] == "0.200000,0.100000,0.800000"
    code, out, _ = run(capsys, "ik", spec_path, "--x", "0.3", "--y", "-0.5", "--z", "1.0")
    assert code == 0 and "q_m = -0.5 m" in out
    code, _, err = run(capsys, "ik", spec_path, "--x", "0.3", "--z", "1.135")
    assert code == 1 and "z exceeds H" in err


def test_curve_pull(tmp_path, spec_path):
    out = tmp_path / "curve.csv"
    assert main(["curve", spec_path, "--kind", "pull", "--grid", "0.2:1.1:10", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# tool-version:")
    assert lines[1] == "h_m,force_N"
    rows = [tuple(map(float, line.split(","))) for line in lines[2:]]
    assert len(rows) == 10
    for h, f in rows:
        assert f == pytest.approx(23.683905 / h, rel=1e-5)


def test_curve_single_point(tmp_path, spec_path):
    out = tmp_path / "c.csv"
    assert main(["curve", spec_path, "--kind", "payload", "--grid", "0.6925:0.6925:1",
                 "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 3


def test_curve_bad_grid(capsys, spec_path):
    code, _, _ = run(capsys, "curve", spec_path, "--kind", "pull", "--grid", "1:0.2:x")
    assert code == 1
    code, _, _ = run(capsys, "curve", spec_path, "--kind", "pull", "--grid", "0.5:2.0:4")
    assert code == 1


def test_curve_unwritable(capsys, tmp_path, spec_path):
    code, _, _ = run(capsys, "curve", spec_path, "--kind", "pull", "--grid", "0.2:1:3",
                     "--out", str(tmp_path / "missing" / "c.csv"))
    assert code == 2


def test_sweep(capsys, spec_path):
    code, out, _ = run(capsys, "sweep", spec_path, "--field", "D", "--grid", "0.5,0.6925,0.9",
                       "--metric", "payload")
    lines = out.splitlines()
    assert code == 0
    assert lines[1] == "D,payload_kg@d=D,valid,note"
    assert [line.split(",")[1] for line in lines[2:]] == ["4.79851", "3.47092", "2.67359"]


def test_sweep_zero_steps(capsys, spec_path):
    code, _, _ = run(capsys, "sweep", spec_path, "--field", "D", "--grid", "0.5:0.9:0")
    assert code == 1


def test_sweep_needs_height(capsys, spec_path):
    code, _, _ = run(capsys, "sweep", spec_path, "--field", "w", "--grid", "0.2:0.4:3",
                     "--metric", "pull")
    assert code == 1


def test_solve(capsys, data_dir):
    code, out, _ = run(capsys, "solve", str(data_dir / "min_mass.problem.json"))
    assert code == 0 and "7.95 kg" in out


def test_solve_infeasible(capsys, tmp_path, spec_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps({
        "schema": "designproblem-v1", "spec": spec_path,
        "objective": {"sense": "minimize", "target": "m_r"},
        "constraints": [{"metric": "pull", "value": 1e5, "height": 1.0}]}))
    code, _, err = run(capsys, "solve", str(path))
    assert code == 1 and "pull >= 100000" in err


def test_solve_missing_file(capsys, tmp_path):
    code, _, _ = run(capsys, "solve", str(tmp_path / "none.json"))
    assert code == 2


def test_check(capsys, spec_path, req_path):
    code, out, _ = run(capsys, "check", spec_path, req_path)
    assert code == 0
    assert out.count("PASS") == 3
    assert "3/3 passed" in out


def test_check_csv(capsys, spec_path, req_path):
    code, out, _ = run(capsys, "check", spec_path, req_path, "--format", "csv")
    rows = out.splitlines()[2:]
    assert code == 0
    assert rows[0] == "open_drawer,pull,0.700000,20.0000,33.8342,13.8342,pass"


def test_check_failure_exit(capsys, tmp_path, spec_path):
    path = tmp_path / "r.json"
    path.write_text(json.dumps({"schema": "taskreq-v1", "requirements": [
        {"name": "heavy", "kind": "pull", "magnitude": 100, "height": 1.0}]}))
    code, out, _ = run(capsys, "check", spec_path, str(path))
    assert code == 1 and "FAIL" in out


def test_record(tmp_path, spec_path):
    out, rec = tmp_path / "c.csv", tmp_path / "rec.json"
    assert main(["curve", spec_path, "--kind", "backpush", "--grid", "0.5:1:2",
                 "--out", str(out), "--record", str(rec)]) == 0
    doc = json.loads(rec.read_text())
    assert doc["command"] == "curve"
    assert doc["version"] == __version__
    assert list(doc["inputs"]) == [spec_path]
    assert doc["rows"][0] == ["h_m", "force_N"]
    again = RunRecord.build("curve", [spec_path], out.read_text())
    assert again.to_json() == rec.read_text()


def test_module_entry_point(spec_path):
    proc = subprocess.run([sys.executable, "-m", "stretchstab", "validate", spec_path],
                          capture_output=True, text=True)
    assert proc.returncode == 0
