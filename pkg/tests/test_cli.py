import csv
import io
import json
import os
import subprocess
import sys

import pytest

from ptspectra.cli import emit_sweep, fmt, parse_coupling, run, to_json


def cli(*args, env=None):
    e = dict(os.environ)
    e.pop("PT_SPECTRA_TOL", None)
    e.update(env or {})
    return subprocess.run([sys.executable, "-m", "ptspectra", *args], capture_output=True,
                          text=True, env=e, timeout=300)


def call(*args):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(args), out, err)
    return code, out.getvalue(), err.getvalue()


def test_fmt():
    assert fmt(7.031649451844849) == "7.03164945184"
    assert fmt(0) == "0"
    assert fmt(1.78575e-6) == "1.78575000000e-06"
    assert fmt(2.5e6) == "2.50000000000e+06"
    with pytest.raises(ValueError):
        fmt(float("nan"))


def test_parse_coupling():
    assert parse_coupling("5.0i") == 5j
    assert parse_coupling("-i") == -1j
    assert parse_coupling("12.31") == 12.31


def test_spectrum_hard_json_subprocess():
    r = cli("spectrum-hard", "--g", "12.31", "--count", "5", "--format", "json")
    assert r.returncode == 0, r.stderr
    doc = json.loads(r.stdout)
    vals = [e["value"]["re"] for e in doc["eigenvalues"]]
    assert vals == pytest.approx([7.03165, 7.1848, 21.7217, 39.1884, 61.4929], abs=1e-3)
    assert doc["pt_broken"] is False


def test_json_byte_stable_and_deterministic():
    a = call("spectrum-hard", "--g", "12.32", "--count", "5")[1]
    b = call("spectrum-hard", "--g", "12.32", "--count", "5")[1]
    assert a == b
    assert to_json(json.loads(a)) + "\n" == a


def test_csv_matches_json():
    _, js, _ = call("spectrum-hard", "--g", "54", "--count", "5")
    _, cs, _ = call("spectrum-hard", "--g", "54", "--count", "5", "--format", "csv")
    doc = json.loads(js)
    rows = list(csv.DictReader(io.StringIO(cs)))
    assert len(rows) == 5
    for row, e in zip(rows, doc["eigenvalues"]):
        assert float(row["E_re"]) == e["value"]["re"]
        assert float(row["E_im"]) == e["value"]["im"]
        assert row["kind"] == e["kind"]


def test_plot_format():
    code, out, _ = call("matrix", "--g", "12.31", "--count", "3", "--format", "plot")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# ")
    assert len(lines) == 4 and all(len(l.split()) == 5 for l in lines[1:])


def test_imaginary_coupling_literal():
    code, out, _ = call("spectrum-hard", "--g", "5.0i", "--count", "3")
    assert code == 0
    vals = [e["value"]["re"] for e in json.loads(out)["eigenvalues"]]
    assert vals[0] == pytest.approx(2.04169, abs=1e-5)


def test_soft_and_companions():
    doc = json.loads(call("spectrum-soft", "--g", "1.2")[1])
    assert doc["eigenvalues"] == pytest.approx([-0.40891664, -0.14427276], abs=1e-7)
    assert json.loads(call("rectwell", "--v1", "0", "--v2", "5")[1])["eigenvalues"] == []
    assert json.loads(call("stepwell", "--v0", "3")[1])["eigenvalues"] == []


def test_usage_errors_exit_1():
    assert cli("spectrum-hard", "--g", "abc").returncode == 1
    assert cli("nonsense").returncode == 1
    assert call("critical", "--g-min", "13", "--g-max", "12")[0] == 1
    assert call("spectrum-soft", "--g", "1i")[0] == 1


def test_env_tolerance():
    r = cli("bands", "--g", "3.4", "--E-max", "10", env={"PT_SPECTRA_TOL": "1e-6"})
    assert r.returncode == 0
    assert json.loads(r.stdout)["root_tol"] == 1e-6
    assert cli("bands", "--g", "3.4", env={"PT_SPECTRA_TOL": "x"}).returncode == 1


def test_solver_error_exit_2():
    # no bound pair at the lower end of the coupling range
    code, _, err = call("critical", "--system", "soft", "--g-min", "1.3", "--g-max", "2")
    assert code == 2
    assert "NoConvergence" in err


def test_sweep_rows_and_status():
    out = io.StringIO()
    code = emit_sweep("soft", [0.6, 1.2, 2.0], "real-count", out)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out.getvalue())))
    assert rows[0] == ["g", "real_count", "status"]
    assert [r[1] for r in rows[1:]] == ["2", "2", "0"]
    assert all(r[-1] == "ok" for r in rows[1:])


def test_sweep_cli_grid():
    code, out, _ = call("sweep", "--system", "hard", "--quantity", "real-count",
                        "--g-min", "12.0", "--g-max", "12.5", "--g-step", "0.25")
    assert code == 0
    counts = [int(r[1]) for r in list(csv.reader(io.StringIO(out)))[1:]]
    assert counts[0] - counts[-1] == 2
