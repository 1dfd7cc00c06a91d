import json

import pytest

from bogoflow import cli


def run_cli(args):
    return cli.main(args)


def test_solve_writes_record_and_exits_zero(tmp_path, capsys):
    out = tmp_path / "run"
    code = run_cli(["--mode", "solve", "--n", "1024", "--epsilon", "0.01", "--out", str(out)])
    assert code == 0
    record = json.loads((out / "point-0.json").read_text())
    assert record["n"] == 1024
    assert record["abs_err"] < 0.01
    assert "z_star" in capsys.readouterr().out
    manifest = json.loads((out / "manifest.json").read_text())
    assert {f["name"] for f in manifest["files"]} == {"point-0.json"}


def test_solve_rejects_odd_n(tmp_path, capsys):
    code = run_cli(["--mode", "solve", "--n", "1023", "--epsilon", "0.01", "--out", str(tmp_path)])
    assert code == 1
    assert "must be even" in capsys.readouterr().err


def test_solve_flags_regime_violation(tmp_path):
    code = run_cli(["--mode", "solve", "--n", "100", "--epsilon", "0.001", "--out", str(tmp_path)])
    assert code == 2


def test_sweep_grid_rows_and_manifest(tmp_path):
    out = tmp_path / "sweep"
    code = run_cli(
        [
            "--mode", "sweep",
            "--n", "16,32,64,128",
            "--epsilon", "0.5,0.1,0.05,0.01",
            "--out", str(out),
        ]
    )
    assert code == 0
    lines = (out / "results.csv").read_text().splitlines()
    assert len(lines) == 17  # header + 4x4 grid
    manifest = json.loads((out / "manifest.json").read_text())
    assert len(manifest["points"]) == 16
    assert all("wall_ms" in point for point in manifest["points"])


def test_sweep_error_decreases_with_n(tmp_path):
    out = tmp_path / "sweep"
    run_cli(["--mode", "sweep", "--n", "1000:100000:10", "--epsilon", "0.01", "--out", str(out)])
    lines = (out / "results.csv").read_text().splitlines()[1:]
    errs = [float(line.split(",")[4]) for line in lines]
    assert all(a > b for a, b in zip(errs, errs[1:]))


def test_sweep_deterministic_across_workers(tmp_path):
    args = ["--mode", "sweep", "--n", "16,64,256", "--epsilon", "0.1,0.01"]
    out1, out2 = tmp_path / "w1", tmp_path / "w8"
    assert run_cli(args + ["--workers", "1", "--out", str(out1)]) == 0
    assert run_cli(args + ["--workers", "8", "--out", str(out2)]) == 0
    assert (out1 / "results.csv").read_bytes() == (out2 / "results.csv").read_bytes()


def test_empty_grid_rejected(tmp_path, capsys):
    code = run_cli(["--mode", "sweep", "--n", "", "--epsilon", "0.01", "--out", str(tmp_path)])
    assert code == 1


def test_env_var_overrides_out(tmp_path, monkeypatch):
    env_out = tmp_path / "env-out"
    monkeypatch.setenv("BOGOFLOW_OUT", str(env_out))
    code = run_cli(["--mode", "solve", "--n", "64", "--epsilon", "0.1", "--out", str(tmp_path / "ignored")])
    assert code == 0
    assert (env_out / "point-0.json").exists()
    assert not (tmp_path / "ignored").exists()


def test_config_file_with_overrides(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("mode=solve\nn=256\nepsilon=0.1\n# comment\nout=" + str(tmp_path / "a") + "\n")
    code = run_cli(["--config", str(cfg), "--epsilon", "0.05"])
    assert code == 0
    record = json.loads((tmp_path / "a" / "point-0.json").read_text())
    assert record["epsilon"] == 0.05


def test_config_file_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("frobnicate=1\n")
    assert run_cli(["--config", str(cfg)]) == 1
    assert "unknown configuration key" in capsys.readouterr().err


def test_verify_only_sequences(tmp_path, capsys):
    out = tmp_path / "verify"
    code = run_cli(
        ["--mode", "verify", "--only", "sequences", "--n", "64,128", "--epsilon", "0.1,0.04", "--out", str(out)]
    )
    assert code == 0
    report = json.loads((out / "verify.json").read_text())
    names = {entry["name"] for entry in report}
    assert "y_closed_residual" in names
    assert "cf_equivalence" not in names


def test_verify_negative_control(tmp_path, capsys):
    # perturbing one coupling must break the matrix-vs-flow equivalence
    out = tmp_path / "verify"
    code = run_cli(
        [
            "--mode", "verify",
            "--only", "cf",
            "--n", "128",
            "--epsilon", "0.01",
            "--perturb-tk", "1e-6",
            "--out", str(out),
        ]
    )
    assert code == 1
    report = json.loads((out / "verify.json").read_text())
    assert report[0]["name"] == "cf_equivalence"
    assert not report[0]["passed"]
    assert report[0]["margin"] < 0.0


def test_sequences_mode_writes_csvs(tmp_path):
    out = tmp_path / "seq"
    code = run_cli(
        ["--mode", "sequences", "--n", "4096", "--epsilon", "0.04", "--out", str(out)]
    )
    assert code == 0
    names = {p.name for p in out.glob("*.csv")}
    assert any(name.startswith("x-") for name in names)
    assert any(name.startswith("ystar-") for name in names)


def test_geometric_grid_parsing():
    assert cli._parse_grid("1000:100000:10", int) == [1000, 10000, 100000]
    assert cli._parse_grid("0.5,0.1", float) == [0.5, 0.1]
    with pytest.raises(ValueError):
        cli._parse_grid("10:1:2", int)
