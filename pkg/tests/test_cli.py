import csv
import io
import json
import math

import pytest

from biphoton.cli import dispatch
from biphoton.correlate import correlation_sweep


def run(capsys, *argv):
    code = dispatch(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def csv_rows(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def test_rto_csv(capsys):
    code, out, _ = run(capsys, "rto", "--phase-a", "0", "--phase-b", "0", "--format", "csv")
    assert code == 0
    [row] = csv_rows(out)
    assert list(row) == ["delta_rad", "w_rad", "p11", "p22", "p12", "p21", "p_corr", "p_anti", "degree"]
    assert {k: float(v) for k, v in row.items()} == pytest.approx(
        dict(delta_rad=0, w_rad=0, p11=0.5, p22=0.5, p12=0, p21=0, p_corr=1, p_anti=0, degree=1), abs=1e-12)


def test_rto_bogus_phase(capsys):
    code, out, err = run(capsys, "rto", "--phase-a", "bogus")
    assert code == 2
    assert out == ""
    assert "invalid float" in err


def test_unknown_subcommand(capsys):
    code, out, err = run(capsys, "teleport")
    assert code == 2 and out == "" and "usage" in err


def test_chsh_defaults(capsys):
    code, out, _ = run(capsys, "chsh")
    doc = json.loads(out)
    assert set(doc) == {"manifest", "rows"}
    [row] = doc["rows"]
    assert row["s_value"] == pytest.approx(2.8284271, abs=1e-7)
    assert row["violated"] is True


def test_chsh_sampled(capsys):
    _, out, _ = run(capsys, "chsh", "--trials", "20000", "--seed", "3")
    [row] = json.loads(out)["rows"]
    assert abs(row["s_sampled"] - 2 * math.sqrt(2)) <= 5 * row["s_std_err"]


def test_sweep_schema(capsys):
    _, out, _ = run(capsys, "sweep", "--points", "3", "--format", "csv")
    lines = [line for line in out.splitlines() if not line.startswith("#")]
    assert lines[0] == "delta_rad,p_corr,p_anti,degree"
    assert len(lines) == 4


def test_json_round_trip(capsys):
    _, out, _ = run(capsys, "sweep", "--points", "25")
    rows = json.loads(out)["rows"]
    expected = correlation_sweep([r["delta_rad"] for r in rows])
    for row, rep in zip(rows, expected):
        assert abs(row["degree"] - rep.degree) <= 1e-12
        assert abs(row["p_corr"] - rep.p_corr) <= 1e-12


def test_sampled_sweep_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert dispatch(["sweep", "--points", "5", "--trials", "5000", "--seed", "11",
                         "--format", "csv", "-o", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert "c_hat" in a.read_text()


def test_env_seed(monkeypatch, capsys):
    monkeypatch.setenv("BIPHOTON_SEED", "77")
    _, env_out, _ = run(capsys, "rto", "--trials", "1000")
    _, flag_out, _ = run(capsys, "rto", "--trials", "1000", "--seed", "77")
    _, wins_out, _ = run(capsys, "rto", "--trials", "1000", "--seed", "78")
    assert env_out == flag_out
    assert json.loads(wins_out)["manifest"]["parameters"]["seed"] == 78


def test_manifest_contents(capsys):
    _, out, _ = run(capsys, "rto", "--phase-b", "0.5", "--w", "0.1", "--placement", "A2_B2")
    manifest = json.loads(out)["manifest"]
    assert manifest["command"] == "rto"
    assert manifest["version"] == "0.1.0"
    assert manifest["checksum"].startswith("sha256:")
    assert manifest["parameters"]["placement"] == "A2_B2"
    assert manifest["parameters"]["w_rad"] == 0.1


def test_csv_manifest_comments(capsys):
    _, out, _ = run(capsys, "mzi", "--format", "csv")
    head = out.splitlines()[:4]
    assert [line.split(":")[0] for line in head] == ["# command", "# parameters", "# version", "# checksum"]


def test_degrees_switch(capsys):
    _, deg, _ = run(capsys, "mzi", "--phi1", "180", "--degrees", "--format", "csv")
    _, rad, _ = run(capsys, "mzi", "--phi1", str(math.pi), "--format", "csv")
    assert deg == rad
    [row] = csv_rows(deg)
    assert float(row["p_2d"]) == pytest.approx(1, abs=1e-12)


def test_mzi_schema(capsys):
    _, out, _ = run(capsys, "mzi", "--points", "5", "--format", "csv")
    assert list(csv_rows(out)[0]) == ["phi1_rad", "phi2_rad", "p_1d", "p_2d"]


def test_table1(capsys):
    _, out, _ = run(capsys, "table1", "--format", "csv")
    rows = csv_rows(out)
    assert list(rows[0]) == ["phase_rad", "simple_p1", "local_p1_a", "local_p1_b", "p_corr", "p_anti",
                             "paper_claim", "flag"]
    assert [r["flag"] for r in rows] == ["ok", "mismatch", "ok", "mismatch", "ok"]


def test_whichpath_and_ledger(capsys):
    _, out, _ = run(capsys, "whichpath", "--overlap", "0", "--points", "7")
    assert all(r["p_port1"] == 0.5 for r in json.loads(out)["rows"])
    _, out, _ = run(capsys, "ledger", "--overlap", "0")
    [row] = json.loads(out)["rows"]
    assert row["local_purity_a"] == 0.5 and row["global_purity"] == 1


def test_overlap_out_of_range(capsys):
    code, out, _ = run(capsys, "ledger", "--overlap", "2")
    assert code == 2 and out == ""


def test_unwritable_destination(tmp_path, capsys):
    code, _, err = run(capsys, "chsh", "-o", str(tmp_path / "missing" / "out.json"))
    assert code == 1
    assert "cannot write" in err


def test_plot_written(tmp_path, capsys):
    fig = tmp_path / "fig3.svg"
    code, _, _ = run(capsys, "sweep", "--points", "9", "--trials", "2000", "--plot", str(fig))
    assert code == 0
    assert fig.read_text().lstrip().startswith("<?xml")
    for cmd in ("mzi", "whichpath"):
        path = tmp_path / f"{cmd}.png"
        assert dispatch([cmd, "--plot", str(path), "-o", str(tmp_path / f"{cmd}.json")]) == 0
        assert path.stat().st_size > 0
