import json
import os
import subprocess
import sys

import pytest

from qdelaunay.cache import ProfileCache, cache_key, default_cache_dir
from qdelaunay.cli import main, write_csv
from qdelaunay import make_params


def run(*args, cache=None):
    env = dict(os.environ)
    if cache:
        env["QDELAUNAY_CACHE"] = str(cache)
    return subprocess.run([sys.executable, "-m", "qdelaunay", *args], capture_output=True,
                          text=True, env=env, timeout=600)


def test_delaunay_row_and_profile(tmp_path, capsys):
    out = tmp_path / "prof.json"
    assert main(["delaunay", "--n", "6", "--eps", "0.5", "--profile-out", str(out)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n,epsilon,period,energy,b_star"
    assert lines[1].startswith("6,0.5,4.26286279141")
    assert json.loads(out.read_text())["schema_version"] == 1


def test_exit_codes(tmp_path):
    assert run("delaunay", "--n", "6", "--eps", "1.1").returncode == 1
    assert run("delaunay", "--eps").returncode == 1
    assert run("delaunay", "--n", "3", "--eps", "0.5").returncode == 1
    assert run("indicial", "--eps", "0.5", "--k", "0..x").returncode == 1
    assert run("nonsense").returncode == 1


def test_cache_hit_identical(tmp_path):
    a = run("delaunay", "--eps", "0.5", cache=tmp_path)
    b = run("delaunay", "--eps", "0.5", cache=tmp_path)
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout
    assert "cache miss" in a.stderr and "cache hit" in b.stderr


def test_indicial_cylinder(capsys):
    assert main(["indicial", "--eps", "cyl", "--k", "0..3"]) == 0
    rows = [r.split(",") for r in capsys.readouterr().out.splitlines()[1:]]
    assert [int(r[2]) for r in rows] == [0, 1, 2, 3]
    assert float(rows[1][5]) == pytest.approx(1.0, abs=1e-6)
    assert float(rows[1][6]) == pytest.approx(19**0.5, abs=1e-6)


def test_bands_columns(capsys):
    assert main(["bands", "--eps", "0.7", "--k", "0", "--phi-grid", "9", "--m-max", "4"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n,epsilon,k,phi,sigma_0,sigma_1,sigma_2,sigma_3,sigma_4"
    assert len(lines) == 10
    for line in lines[1:]:
        sig = [float(x) for x in line.split(",")[4:]]
        assert sig == sorted(sig)


def test_json_format(capsys):
    assert main(["energy-table", "--points", "3", "--eps-min", "0.4", "--format", "json"]) == 0
    recs = json.loads(capsys.readouterr().out)
    assert [r["n"] for r in recs] == [6, 6, 6]
    assert recs[0]["period"] > recs[-1]["period"]


def test_expansion(capsys, tmp_path):
    out = tmp_path / "e.csv"
    assert main(["expansion", "--eps", "0.5", "--a", "0.1", "--n-t", "5", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t,error,beta" and len(lines) == 6
    assert main(["expansion", "--eps", "0.5", "--a", "0.9"]) == 1


def test_csv_format():
    import io
    buf = io.StringIO()
    write_csv(["a", "b", "c"], [[1, 0.1, True]], buf)
    assert buf.getvalue() == "a,b,c\n1,0.10000000000000001,true\n"


def test_cache_recomputes_corrupt(tmp_path):
    p = make_params(6)
    c = ProfileCache(tmp_path)
    prof = c.get(p, 0.5)
    path = c.path(6, 0.5, prof.tol, prof.n_samples)
    path.write_text(path.read_text()[:-40])
    again = c.get(p, 0.5)
    assert c.misses == 2 and again.period == prof.period
    assert ProfileCache(tmp_path).get(p, 0.5).period == prof.period


def test_cache_location(monkeypatch, tmp_path):
    monkeypatch.setenv("QDELAUNAY_CACHE", str(tmp_path))
    assert default_cache_dir() == tmp_path
    monkeypatch.delenv("QDELAUNAY_CACHE")
    monkeypatch.setenv("XDG_DATA_HOME", str(tmp_path / "x"))
    assert default_cache_dir() == tmp_path / "x" / "qdelaunay" / "profiles"
    assert cache_key(6, 0.5, 1e-12, 2048) != cache_key(6, 0.5, 1e-11, 2048)


def test_verify_quick_deterministic(tmp_path):
    a = run("verify", "--quick", cache=tmp_path)
    b = run("verify", "--quick", cache=tmp_path)
    assert a.returncode == 0
    assert a.stdout == b.stdout
    assert "FAIL " not in a.stdout
    assert run("verify", "--quick", "--strict", cache=tmp_path).returncode == 3
