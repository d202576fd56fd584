import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from chaindecay.bessel import first_zero_j1
from chaindecay.cli import SUMMARY_KEYS, UNITS, main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    rows = list(csv.reader(io.StringIO("\n".join(lines))))
    return rows[0], rows[1:]


def test_ldos_peak_row(capsys):
    code, out, _ = run_cli(capsys, "ldos", "--delta", "0.2", "--eps0", "2.0")
    assert code == 0
    assert out.splitlines()[0] == UNITS
    header, rows = read_csv(out)
    assert header == ["eps", "ldos"]
    table = {float(r[0]): float(r[1]) for r in rows}
    assert table[2.0] == pytest.approx(25 / math.pi, rel=1e-14)
    assert max(table.values()) == table[2.0]


def test_ldos_bound_state_lines(capsys):
    code, out, _ = run_cli(capsys, "ldos", "--delta", "1.5", "--eps0", "2", "--count", "3")
    assert code == 0
    bound = [ln for ln in out.splitlines() if ln.startswith("# bound_state")]
    assert len(bound) == 2 and "weight=0.09999999" in bound[0]


def test_survival_bessel_first_zero(capsys):
    code, out, _ = run_cli(capsys, "survival", "--delta", "1.0", "--eps0", "2.0", "--method",
                           "bessel", "--tmax", "10", "--count", "10001")
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["t", "re_c", "im_c", "P"]
    t = np.array([float(r[0]) for r in rows])
    p = np.array([float(r[3]) for r in rows])
    first_dip = t[np.argmin(np.where(t < 3, p, 1.0))]
    assert first_dip == pytest.approx(1.9159, abs=1e-3)
    assert first_dip == pytest.approx(first_zero_j1() / 2, abs=1e-3)


def test_survival_values_round_trip(capsys):
    from chaindecay import ChainModel, evolve_spectral
    code, out, _ = run_cli(capsys, "survival", "--delta", "0.3", "--eps0", "2.2",
                           "--tmax", "4", "--count", "5")
    _, rows = read_csv(out)
    ref = evolve_spectral(ChainModel(2.2, 0.3), np.linspace(0, 4, 5)).amplitude
    assert [float(r[1]) for r in rows] == list(ref.real)
    assert [float(r[2]) for r in rows] == list(ref.imag)


def test_zeno_summary_keys_and_values(capsys, tmp_path):
    summary_path = tmp_path / "summary.json"
    code, out, _ = run_cli(capsys, "zeno", "--delta", "0.2", "--eps0", "2.0", "--count", "20",
                           "--summary", str(summary_path))
    assert code == 0
    summary = json.loads(summary_path.read_text())
    assert tuple(k for k in summary if k != "notes") == SUMMARY_KEYS
    assert summary["gamma0"] == pytest.approx(0.0816497, abs=1e-7)
    assert summary["Gamma0"] == pytest.approx(0.0408248, abs=1e-7)
    assert summary["t_R_formula"] == pytest.approx(224.7, abs=0.1)
    assert summary["eps_r"] == 2.0
    assert summary["t_S_bath"] == 1.0
    embedded = [ln for ln in out.splitlines() if ln.startswith("# summary ")][0]
    assert json.loads(embedded[len("# summary "):]) == summary
    header, rows = read_csv(out)
    assert header == ["tau", "gamma_eff", "classification"]
    assert len(rows) == 20 and rows[0][2] == "zeno"


def test_zeno_json_strong_coupling(capsys):
    code, out, _ = run_cli(capsys, "zeno", "--delta", "1.5", "--eps0", "2", "--count", "3",
                           "--tmin", "0.5", "--tmax", "2", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    s = doc["summary"]
    assert s["gamma0"] == 4.5 and s["Gamma0"] is None and s["tau_star"] is None
    assert "tau_star" in s["notes"]
    assert s["tau_star_star"] == pytest.approx(1.1222, abs=1e-3)


def test_infinity_written_as_string(capsys):
    tau = repr(first_zero_j1() / 2)
    code, out, _ = run_cli(capsys, "zeno", "--delta", "1", "--eps0", "2", "--tmin", "1",
                           "--tmax", tau, "--count", "2", "--format", "json")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert rows[-1][1] == "inf" and rows[-1][2] == "anti_zeno"


def test_decompose_columns(capsys):
    code, out, _ = run_cli(capsys, "decompose", "--delta", "0.2", "--eps0", "2", "--tmax", "50",
                           "--count", "3")
    assert code == 0
    header, rows = read_csv(out)
    assert header == ["t", "abs_pole", "abs_return", "phase_diff", "P"]
    assert float(rows[0][1]) == pytest.approx(1.0208333333333333, rel=1e-14)


def test_usage_errors_exit_1(capsys):
    for argv in (["survival", "--delta", "0", "--eps0", "2"],
                 ["survival", "--delta", "0.2", "--eps0", "2", "--count", "1"],
                 ["survival", "--delta", "0.2", "--eps0", "2", "--tmin", "5", "--tmax", "1"],
                 ["survival", "--delta", "0.2", "--eps0", "2", "--format", "xml"],
                 ["survival", "--delta", "0.2", "--eps0", "2", "--method", "diagonalization",
                  "--n-sites", "10", "--tmax", "50"],
                 ["survival", "--eps0", "2"],
                 ["nonsense"]):
        code, out, err = run_cli(capsys, *argv)
        assert code == 1, argv
        assert out == ""
        assert err.count("\n") == 1 and err.startswith("error: ")


def test_regime_error_exit_2(capsys):
    code, out, err = run_cli(capsys, "decompose", "--delta", "1.5", "--eps0", "2")
    assert code == 2 and out == ""
    assert "resonance" in err and err.count("\n") == 1


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# demo\nsubcommand = survival\ndelta = 0.3\neps0 = 2.2\n"
                   "count = 3\ntmax = 5  # end\n")
    code, out, _ = run_cli(capsys, "--config", str(cfg))
    assert code == 0
    _, rows = read_csv(out)
    assert [r[0] for r in rows] == ["0.0", "2.5", "5.0"]
    code, out, _ = run_cli(capsys, "survival", "--config", str(cfg), "--tmax", "1")
    _, rows = read_csv(out)
    assert [r[0] for r in rows] == ["0.0", "0.5", "1.0"]


def test_config_file_errors(capsys, tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("delta = 0.2\nwidth = 3\n")
    code, _, err = run_cli(capsys, "survival", "--config", str(cfg), "--eps0", "2")
    assert code == 1 and "width" in err
    code, _, err = run_cli(capsys, "survival", "--config", str(tmp_path / "missing.cfg"))
    assert code == 1


def test_scan_keeps_per_point_errors(capsys):
    code, out, _ = run_cli(capsys, "scan", "--target", "decompose", "--param", "delta",
                           "--values", "0.2,1.5,-1", "--eps0", "2", "--count", "2", "--tmax", "1")
    assert code == 0
    doc = json.loads(out)
    status = [p["status"] for p in doc["points"]]
    assert status == ["ok", "error", "error"]
    assert [p["index"] for p in doc["points"]] == [0, 1, 2]
    assert doc["points"][1]["error_type"] == "RegimeError"


def test_scan_over_eps0(capsys):
    code, out, _ = run_cli(capsys, "scan", "--target", "ldos", "--param", "eps0",
                           "--values", "2 2.5", "--delta", "0.3", "--count", "3")
    assert code == 0
    doc = json.loads(out)
    assert [p["eps0"] for p in doc["points"]] == [2.0, 2.5]


def test_output_file(tmp_path, capsys):
    path = tmp_path / "out.csv"
    code, out, _ = run_cli(capsys, "ldos", "--delta", "0.2", "--eps0", "2", "--count", "5",
                           "-o", str(path))
    assert code == 0 and out == ""
    assert path.read_text().splitlines()[1] == "eps,ldos"


def _subprocess_run(tmp_path, name, *argv):
    path = tmp_path / name
    subprocess.run([sys.executable, "-m", "chaindecay", *argv, "-o", str(path)], check=True)
    return path.read_bytes()


@pytest.mark.parametrize("argv", [
    ("zeno", "--delta", "0.2", "--eps0", "2.0", "--count", "40"),
    ("survival", "--delta", "0.5", "--eps0", "2.4", "--tmax", "200", "--format", "json"),
    ("scan", "--target", "decompose", "--param", "eps0", "--values", "2,2.6", "--delta", "0.2"),
])
def test_byte_identical_runs(tmp_path, argv):
    first = _subprocess_run(tmp_path, "a", *argv)
    second = _subprocess_run(tmp_path, "b", *argv)
    assert first == second and len(first) > 100
