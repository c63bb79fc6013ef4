from __future__ import annotations

import csv
import io
import json

import pytest

from sinfty.cli import EXIT_CAP, EXIT_CONFIG, EXIT_FAIL, EXIT_OK, fmt, main
from sinfty.special import WhittakerKernel


def read_artifact(path):
    lines = path.read_text().splitlines()
    header = [l for l in lines if l.startswith("#")]
    body = [l for l in lines if not l.startswith("#")]
    return header, list(csv.DictReader(io.StringIO("\n".join(body))))


def test_verify_exact(tmp_path):
    out = tmp_path / "v.csv"
    assert main(["verify", "exact", "--max-n", "8", "--out", str(out)]) == EXIT_OK
    header, rows = read_artifact(out)
    assert header[0].startswith("# sinfty ")
    assert json.loads(header[1][len("# config "):])["command"] == "verify"
    assert rows and all(r["passed"] == "true" for r in rows)


def test_zmeasure_sample_is_reproducible(tmp_path):
    args = ["zmeasure", "sample", "--z", "0.5", "--n", "6", "--count", "100000", "--seed", "7"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(args + ["--out", str(a)]) == EXIT_OK
    assert main(args + ["--out", str(b), "--threads", "2"]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    _, rows = read_artifact(a)
    assert sum(int(r["count"]) for r in rows) == 100000
    assert "# seed 7" in a.read_text()


def test_kernel_table_round_trip(tmp_path):
    grid = tmp_path / "grid.json"
    grid.write_text(json.dumps({"x": [-1.5, -0.2, 0.3, 2.0]}))
    out = tmp_path / "k.csv"
    assert main(["kernel", "table", "--z", "0.3+0.2i", "--points", str(grid), "--out", str(out)]) == EXIT_OK
    _, rows = read_artifact(out)
    k = WhittakerKernel(0.3 + 0.2j)
    assert len(rows) == 16
    for r in rows:
        assert float(r["K"]) == k(float(r["x"]), float(r["y"]))
    pairs = tmp_path / "pairs.json"
    pairs.write_text(json.dumps([[0.5, -0.5]]))
    assert main(["kernel", "table", "--z", "0.3+0.2i", "--points", str(pairs), "--out", str(out)]) == EXIT_OK


def test_exact_mode_output(tmp_path):
    out = tmp_path / "law.csv"
    assert main(["zmeasure", "law", "--z", "1/2", "--n", "3", "--mode", "exact", "--out", str(out)]) == EXIT_OK
    _, rows = read_artifact(out)
    assert {r["partition"]: r["probability"] for r in rows} == {"3": "5/6", "2,1": "2/15", "1,1,1": "1/30"}


def test_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"z": "1/2", "n": 4, "mode": "exact"}))
    out = tmp_path / "o.csv"
    assert main(["zmeasure", "law", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
    cfg.write_text(json.dumps({"z": "1/2", "bogus": 1}))
    assert main(["zmeasure", "law", "--config", str(cfg)]) == EXIT_CONFIG


def test_exit_codes(tmp_path, capsys):
    assert main(["zmeasure", "law", "--z", "1/2", "--t", "3", "--n", "3"]) == EXIT_CONFIG
    assert main(["zmeasure", "law", "--n", "3"]) == EXIT_CONFIG
    assert main(["zmeasure", "mixed", "--z", "1/2", "--xi", "1.5", "--count", "3"]) == EXIT_CONFIG
    assert main(["partitions", "enumerate", "--n", "70"]) == EXIT_CAP
    assert main(["kernel", "resolvent", "--z", "0.3+0.2i", "--nodes", "64", "--tol", "1e-12"]) == EXIT_FAIL
    assert main(["kernel", "resolvent", "--z", "0.3+0.2i", "--nodes", "8000"]) == EXIT_CAP
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == EXIT_CONFIG


@pytest.mark.parametrize(
    "args",
    [
        ["partitions", "enumerate", "--n", "5"],
        ["partitions", "show", "--lam", "3,1"],
        ["ewens", "law", "--t", "1/2", "--n", "5", "--mode", "exact"],
        ["ewens", "sample", "--t", "0.5", "--n", "6", "--count", "5"],
        ["zmeasure", "dump", "--z", "0.3+0.2i", "--n", "8", "--count", "5"],
        ["zmeasure", "mixed", "--z", "1/2", "--xi", "0.3", "--count", "100"],
        ["zmeasure", "correlation", "--z", "1/2", "--xi", "3/10", "--points=-1/2,1/2"],
        ["characters", "table", "--n", "4"],
        ["characters", "chi-z", "--z", "1/2", "--rho", "2", "--n", "5", "--mode", "exact"],
        ["kernel", "q", "--z", "0.3+0.2i"],
        ["pointproc", "witness", "--z", "1/2", "--xi", "3/10", "--points=-1/2,1/2,3/2"],
        ["pointproc", "poisson", "--density", "2.0", "--window", "0,1", "--count", "10"],
        ["experiment", "main", "--z", "0.3+0.2i", "--n", "100", "--count", "500", "--no-mixed"],
    ],
)
def test_commands_run(args, tmp_path):
    out = tmp_path / "o.csv"
    code = main(args + ["--out", str(out)])
    assert code in (EXIT_OK, EXIT_FAIL)
    header, rows = read_artifact(out)
    assert len(header) == 3 and rows


def test_chi_z_cli_value(tmp_path):
    out = tmp_path / "c.csv"
    main(["characters", "chi-z", "--z", "1/2", "--rho", "2", "--n", "5", "--mode", "exact", "--out", str(out)])
    assert read_artifact(out)[1][0]["chi_z"] == "4/5"


def test_fmt_round_trips_floats():
    for v in (0.1, 1 / 3, 1e-300, 123456789.123):
        assert float(fmt(v)) == v
