import csv
import json
import subprocess
import sys

import pytest

from cachemec.cli import HEADER, SweepSpec, UsageError, canonical_method, main, parse_methods, parse_values


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "scen.json"
    path.write_text(json.dumps({"K": 2, "N": 3, "T_s": 0.08, "C_bits": 5e4, "zipf_gamma": 0.8}))
    return path


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_solve_writes_fixed_header(config, tmp_path):
    out = tmp_path / "o.csv"
    assert main(["solve", "--config", str(config), "--method", "optimal", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == ",".join(HEADER)
    (row,) = _rows(out)
    assert row["method"] == "optimal" and row["K"] == "2" and row["gamma"] == "0.8"
    assert float(row["gap"]) <= 1e-3 and int(row["iterations"]) > 0
    assert row["wall_time_s"] == ""
    # 12 significant digits in scientific notation
    mant = row["average_energy_J"].split("e")[0]
    assert len(mant.replace(".", "").lstrip("-")) == 12


def test_solve_trace(config, tmp_path):
    out, trace = tmp_path / "o.csv", tmp_path / "t.csv"
    assert main(["solve", "--config", str(config), "--method", "optimal", "--trace", str(trace),
                 "--out", str(out)]) == 0
    lines = trace.read_text().splitlines()
    assert lines[0] == "iter,dual_value,max_residual,num_cached"
    assert len(lines) - 1 == int(_rows(out)[0]["iterations"])


def test_trace_only_for_optimal(config, tmp_path, capsys):
    rc = main(["solve", "--config", str(config), "--method", "b1", "--trace", str(tmp_path / "t.csv")])
    assert rc == 2 and "optimal" in capsys.readouterr().err


@pytest.mark.parametrize("name", ["suboptimal", "subopt", "baseline1", "b2", "baseline3", "b4", "oracle"])
def test_every_method_runs(config, tmp_path, name):
    out = tmp_path / "o.csv"
    assert main(["solve", "--config", str(config), "--method", name, "--out", str(out)]) == 0
    assert _rows(out)[0]["method"] == canonical_method(name)


def test_timing_flag(config, tmp_path):
    out = tmp_path / "o.csv"
    main(["solve", "--config", str(config), "--method", "b3", "--timing", "--out", str(out)])
    assert float(_rows(out)[0]["wall_time_s"]) >= 0


def test_method_errors(config, capsys):
    assert main(["solve", "--config", str(config), "--method", "fastest"]) == 2
    err = capsys.readouterr().err
    assert "fastest" in err and "baseline4" in err and "oracle" in err
    with pytest.raises(UsageError, match="empty"):
        parse_methods(" , ")
    assert parse_methods("subopt,b1,suboptimal") == ["suboptimal", "baseline1"]


def test_config_error_has_line_context(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"K": 2,\n  "N": 3\n  "T_s": 0.08}')
    assert main(["solve", "--config", str(bad), "--method", "b1"]) == 2
    err = capsys.readouterr().err
    assert "bad.json:3:" in err and '"T_s": 0.08' in err
    assert main(["solve", "--config", str(tmp_path / "missing.json"), "--method", "b1"]) == 2


def test_sweep_rows_and_order(config, tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--config", str(config), "--param", "T", "--values", "0.05,0.1",
                 "--methods", "b3,subopt", "--out", str(out)]) == 0
    rows = _rows(out)
    assert [(r["method"], r["T_s"]) for r in rows] == [
        ("baseline3", "0.05"), ("baseline3", "0.1"), ("suboptimal", "0.05"), ("suboptimal", "0.1")]


def test_sweep_empty_methods(config, capsys):
    assert main(["sweep", "--config", str(config), "--param", "T", "--values", "0.05",
                 "--methods", ""]) == 2
    assert "empty" in capsys.readouterr().err


def test_sweep_n_regenerates_catalog(config, tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--config", str(config), "--param", "N", "--values", "2,4",
                 "--methods", "b3", "--out", str(out)]) == 0
    assert [r["N"] for r in _rows(out)] == ["2", "4"]


def test_sweep_gamma_replaces_task_pmf(tmp_path):
    base = {"K": 1, "N": 2, "task_pmf": [0.5, 0.5], "C_bits": 0}
    spec = SweepSpec("gamma", (1.0,), base, ("baseline3",))
    assert "task_pmf" not in spec.point(1.0) and spec.point(1.0)["zipf_gamma"] == 1.0
    with pytest.raises(UsageError):
        SweepSpec("N", (3,), base, ("baseline3",)).point(3)
    with pytest.raises(UsageError):
        SweepSpec("speed", (1.0,), base, ("baseline3",))
    with pytest.raises(UsageError):
        parse_values("K", "1,x")
    assert parse_values("K", "1, 2") == (1, 2)


def test_sweep_deterministic_with_workers(config, tmp_path, monkeypatch):
    args = ["sweep", "--config", str(config), "--param", "gamma", "--values", "0.4,1.0",
            "--methods", "optimal,subopt,b1,b2,b3,b4"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == 0
    monkeypatch.setenv("CACHEMEC_WORKERS", "2")
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = _rows(a)
    sub = [r for r in rows if r["method"] == "suboptimal"]
    assert all(r["dual_value_J"] for r in sub)


def test_module_entry_point(config):
    res = subprocess.run([sys.executable, "-m", "cachemec", "solve", "--config", str(config),
                          "--method", "b3"], capture_output=True, text=True, check=True)
    assert res.stdout.startswith("method,K,N,")
