import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from riccati_tontine import cli, golden


def run(args, capsys):
    code = cli.main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


def table(text):
    rows = list(csv.reader(io.StringIO(text)))
    return rows[0], np.array(rows[1:], dtype=float)


def test_schedule_zero_drift(capsys):
    code, out, _ = run(["schedule", "--mu", "0", "--every", "1", "--steps", "2000"], capsys)
    assert code == 0
    head, data = table(out)
    assert head == ["t", "k", "k_closed_form", "z"]
    assert data.shape == (21, 4)
    assert np.all(data[:, 1] == 1.0)


def test_bracket_ordering(capsys):
    code, out, _ = run(["bracket", "--n", "10", "--every", "0.5"], capsys)
    assert code == 0
    head, data = table(out)
    col = {h: data[:, i] for i, h in enumerate(head)}
    assert np.all(col["k_kappa1"] <= col["k_riccati"]) and np.all(col["k_riccati"] <= col["k_kappak"])


def test_csv_format(capsys):
    _, out, _ = run(["schedule", "--every", "10", "--steps", "2000"], capsys)
    assert "\r" not in out and out.endswith("\n")
    assert out.splitlines()[2].split(",")[1] == f"{float(out.splitlines()[2].split(',')[1]):.9g}"


def test_json_shape(tmp_path, capsys):
    path = tmp_path / "v.json"
    code, _, _ = run(["variance", "--n", "4", "--every", "5", "--format", "json", "--out", str(path)], capsys)
    assert code == 0
    doc = json.loads(path.read_text())
    assert set(doc) == {"params", "columns", "meta"}
    assert doc["params"]["n"] == 4 and doc["params"]["sigma"] == 0.2
    assert doc["columns"]["t"] == [0.0, 5.0, 10.0, 15.0, 20.0]
    assert {"method", "steps", "version"} <= set(doc["meta"])


def test_discrete_and_stochmort(capsys):
    code, out, _ = run(["discrete", "--n", "20", "--periods", "20"], capsys)
    _, data = table(out)
    assert code == 0 and data[0, 1] == pytest.approx(golden.DISCRETE_K1, abs=5e-5)
    code, out, _ = run(["stochmort", "--every", "20", "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["columns"]["zbar"][-1] == pytest.approx(golden.ZBAR_T, abs=2e-3)
    assert doc["meta"]["gamma0"] == pytest.approx(golden.GAMMA0, abs=1e-3)


def test_simulate_byte_identical(tmp_path, capsys):
    files = []
    for i, workers in enumerate(("1", "3")):
        files.append(tmp_path / f"s{i}.csv")
        args = ["simulate", "--n", "5", "--paths", "20000", "--seed", "42", "--epsilon", "0",
                "--every", "5", "--workers", workers, "--out", str(files[-1])]
        assert run(args, capsys)[0] == 0
    assert files[0].read_bytes() == files[1].read_bytes()


@pytest.mark.parametrize("target", ["table2", "fig2", "fig3"])
def test_reproduce_passes(target, tmp_path, capsys):
    code, _, err = run(["reproduce", "--target", target, "--out", str(tmp_path / "o.csv")], capsys)
    assert code == 0
    assert "FAIL" not in err and "PASS" in err


def test_reproduce_reports_golden_failure(monkeypatch, tmp_path, capsys):
    monkeypatch.setattr(golden, "TABLE1", {t: v + 1e-3 for t, v in golden.TABLE1.items()})
    code, _, err = run(["reproduce", "--target", "table1", "--out", str(tmp_path / "o.csv")], capsys)
    assert code == cli.EXIT_GOLDEN
    assert "FAIL" in err


@pytest.mark.parametrize("args", [
    ["bracket", "--n", "1"],
    ["schedule", "--steps", "0"],
    ["schedule", "--b", "-1"],
    ["schedule", "--every", "0.00033"],
    ["reproduce"],
    ["reproduce", "--target", "table9"],
    ["simulate", "--rho", "2"],
    ["schedule", "--n", "abc"],
    ["nonsense"],
])
def test_invalid_config(args, capsys):
    with pytest.raises(SystemExit) as info:
        raise SystemExit(cli.main(args))
    assert info.value.code == cli.EXIT_CONFIG


def test_numerical_failure(capsys):
    code, _, err = run(["schedule", "--mu", "-5", "--T", "200", "--steps", "2000"], capsys)
    assert code == cli.EXIT_NUMERIC
    assert "numerical failure" in err


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "riccati_tontine", "schedule", "--every", "20", "--steps", "200"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    assert out.stdout.splitlines()[0] == "t,k,k_closed_form,z"


def test_hazard_cap_is_config_error(capsys):
    code, _, err = run(["stochmort", "--lambda-inf", "0.05", "--steps", "2000"], capsys)
    assert code == cli.EXIT_CONFIG
    assert "hazard cap" in err
