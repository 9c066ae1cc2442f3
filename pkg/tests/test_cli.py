import json
import subprocess
import sys

import numpy as np
import pytest
from scipy import stats

from poismix import cli


def write_spec(tmp_path, name="spec.json", **fields):
    path = tmp_path / name
    path.write_text(json.dumps({"schema": "poismix/1", **fields}))
    return str(path)


@pytest.fixture
def cts(tmp_path):
    return write_spec(tmp_path, family="cts", alpha=0.25, cplus=1.0, lplus=0.5)


@pytest.fixture
def sym(tmp_path):
    return write_spec(tmp_path, "sym.json", family="cts", alpha=0.5, cplus=1.0, lplus=0.5, cminus=1.0, lminus=0.5)


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_accept(capsys, cts):
    code, out, _ = run(capsys, "accept", "--spec", cts, "--a", "0.5")
    assert code == 0 and out == "alg4=0.1739 alg5=0.7568\n"


def test_pmf_point_mass(capsys, tmp_path):
    spec = write_spec(tmp_path, family="pointmass", rate=2.0, loc=1.0)
    code, out, _ = run(capsys, "pmf", "--spec", spec, "--a", "1", "--kmax", "5")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# spec ") and lines[2] == "k,p"
    p0 = float(lines[3].split(",")[1])
    # P(Z(N) = 0) with N ~ Pois(2): exp(-2 (1 - 1/e))
    assert p0 == pytest.approx(np.exp(-2 * (1 - np.exp(-1))), rel=1e-12)
    assert len(lines) == 3 + 6


def test_sample_csv_and_json(capsys, tmp_path, cts):
    code, out, _ = run(capsys, "sample", "--spec", cts, "--a", "0.01", "--n", "2000", "--seed", "3")
    lines = out.splitlines()
    assert code == 0 and len(lines) == 2003
    assert lines[1] == "# a 0.01" and lines[2] == "# seed 3"
    x = np.array([float(v) for v in lines[3:]])
    assert np.allclose(x / 0.01, np.round(x / 0.01))
    dest = tmp_path / "s.json"
    code, _, _ = run(capsys, "sample", "--spec", cts, "--a", "0.01", "--n", "50", "--seed", "3",
                     "--format", "json", "--out", str(dest))
    data = json.loads(dest.read_text())
    assert code == 0 and len(data["values"]) == 50 and data["seed"] == 3
    v = np.asarray(data["values"]) / 0.01
    assert np.allclose(v, np.round(v)) and v.min() >= 0


def test_sample_algorithms_agree(capsys, tmp_path):
    spec = write_spec(tmp_path, family="cts", alpha=0.5, cplus=1.0, lplus=0.5)
    draws = {}
    for algo in ("inverse", "compound"):
        _, out, _ = run(capsys, "sample", "--spec", spec, "--a", "0.1", "--n", "5000", "--seed", "1", "--algo", algo)
        draws[algo] = np.array([float(v) for v in out.splitlines()[3:]])
    assert stats.ks_2samp(draws["inverse"], draws["compound"]).pvalue > 1e-3


@pytest.mark.parametrize("spec_name", ["cts", "sym"])
def test_sample_output_independent_of_threads(capsys, request, spec_name):
    spec = request.getfixturevalue(spec_name)
    outs = []
    for t in ("1", "2", "8"):
        code, out, _ = run(capsys, "sample", "--spec", spec, "--a", "0.001", "--n", "3000", "--seed", "7",
                           "--threads", t)
        assert code == 0
        outs.append(out.encode())
    assert outs[0] == outs[1] == outs[2]


def test_bounds_report(capsys, sym):
    code, out, _ = run(capsys, "bounds", "--spec", sym, "--a-grid", "0.1,0.01", "--p", "inf,2", "--exact")
    data = json.loads(out)
    assert code == 0 and len(data["rows"]) == 4
    for r in data["rows"]:
        if r["p"] == "inf":
            assert r["exact"] <= r["thm1"] and r["exact"] <= r["thm2"]


def test_gof_with_diagnostics(capsys, tmp_path, sym):
    prefix = tmp_path / "diag"
    code, out, _ = run(capsys, "gof", "--spec", sym, "--a", "0.001", "--n", "2000", "--seed", "2",
                       "--reps", "2", "--diagnostics", str(prefix))
    lines = out.splitlines()
    assert code == 0 and lines[0] == "rep,ks_stat,ks_p,cvm_stat,cvm_p" and len(lines) == 3
    assert (tmp_path / "diag_kde.csv").exists() and (tmp_path / "diag_qq.csv").exists()


def test_table1_json(capsys):
    code, out, _ = run(capsys, "table1", "--format", "json")
    rows = json.loads(out)
    assert code == 0 and len(rows) == 12 and {"alpha", "a", "alg4", "alg5"} <= set(rows[0])


def test_table2_small(capsys, sym):
    code, out, _ = run(capsys, "table2", "--spec", sym, "--a-grid", "0.01", "--reps", "2", "--n", "300")
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("family,alpha,a,ks,cvm") and len(lines) == 2


def test_rate_study(capsys, tmp_path):
    spec = write_spec(tmp_path, family="cts", alpha=0.5, cplus=1.0, lplus=0.5)
    code, out, _ = run(capsys, "rate-study", "--spec", spec, "--a-grid", "0.0625,0.015625")
    assert code == 0 and "# slope" in out and "# predicted 0.6666666666666666" in out


@pytest.mark.parametrize("argv", [
    ["sample", "--n", "10"],
    ["sample", "--spec", "x.json"],
    ["sample", "--a", "0.1", "--n", "10"],
    ["nonsense"],
    ["pmf", "--a", "-1", "--kmax", "3", "--spec", "x.json"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2


def test_bad_spec_contents(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "accept", "--spec", str(bad), "--a", "0.1")[0] == 2
    custom = write_spec(tmp_path, "c.json", family="custom")
    assert run(capsys, "accept", "--spec", custom, "--a", "0.1")[0] == 2
    alpha = write_spec(tmp_path, "a.json", family="cts", alpha=1.5, cplus=1.0, lplus=1.0)
    assert run(capsys, "accept", "--spec", alpha, "--a", "0.1")[0] == 2
    wrong = write_spec(tmp_path, "w.json", family="cts")
    assert run(capsys, "accept", "--spec", wrong, "--a", "0.1")[0] == 2
    schema = tmp_path / "s.json"
    schema.write_text(json.dumps({"schema": "other/9", "family": "cts"}))
    assert run(capsys, "accept", "--spec", str(schema), "--a", "0.1")[0] == 2


def test_numeric_failures_exit_1(capsys, tmp_path, sym):
    code, _, err = run(capsys, "accept", "--spec", str(tmp_path / "missing.json"), "--a", "0.1")
    assert code == 1 and "missing.json" in err


def test_console_entry_point(tmp_path, cts):
    out = subprocess.run([sys.executable, "-m", "poismix", "accept", "--spec", cts, "--a", "0.5"],
                         capture_output=True, text=True, check=True)
    assert out.stdout == "alg4=0.1739 alg5=0.7568\n"
