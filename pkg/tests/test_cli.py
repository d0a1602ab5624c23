import csv
import io
import json
import math

import pytest

from relcm import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr().out


def read_csv(text):
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(lines))))


def test_parse_helpers():
    assert cli.parse_real("1.5pi") == pytest.approx(1.5 * math.pi)
    assert cli.parse_real("-pi") == pytest.approx(-math.pi)
    assert cli.parse_complex_list("0:1:3") == pytest.approx([0, 0.5, 1])
    assert cli.parse_complex_list("1+2j,3") == [1 + 2j, 3]
    assert cli.format_complex(1.0) == "1+0i"
    with pytest.raises(cli.ConfigError):
        cli.parse_range("1:1:3")
    with pytest.raises(cli.ConfigError):
        cli.parse_range("0:1:0")


def test_gamma_at_origin_is_one(capsys):
    code, out = run(capsys, "eval", "gamma", "--z", "0")
    assert code == cli.EXIT_OK
    assert "1+0i" in out


def test_eval_csv_columns_and_plane_wave(capsys):
    code, out = run(capsys, "eval", "psi", "--x", "0.3,1.1", "--y", "0.7", "--a-plus", "1",
                    "--a-minus", "1.4142135623730951", "--b-mode", "a-minus", "--format", "csv")
    assert code == cli.EXIT_OK
    rows = read_csv(out)
    assert tuple(rows[0]) == cli.EVAL_COLUMNS
    vals = {}
    for r in rows:
        vals.setdefault(r["x_re"], {})[r["quantity"]] = complex(float(r["value_re"]), float(r["value_im"]))
    for q in vals.values():
        assert abs(q["psi"] - q["plane_wave"]) < 1e-12


def test_amplitudes_n0(capsys):
    code, out = run(capsys, "eval", "amplitudes", "--n", "0", "--y", "0.5",
                    "--a-plus", "1", "--a-minus", "2.6", "--format", "csv")
    assert code == cli.EXIT_OK
    u = [r for r in read_csv(out) if r["quantity"] == "u"]
    assert u and all(float(r["value_re"]) == pytest.approx(1.0) and abs(float(r["value_im"])) < 1e-14
                     for r in u)


def test_config_errors_exit_2(capsys):
    assert run(capsys, "scan", "--range", "1:1:3")[0] == cli.EXIT_CONFIG
    assert run(capsys, "scan", "--range", "1:2:0")[0] == cli.EXIT_CONFIG
    assert run(capsys, "eval", "gamma", "--a-plus", "1")[0] == cli.EXIT_CONFIG
    assert run(capsys, "eval", "nosuch")[0] == cli.EXIT_CONFIG
    assert run(capsys, "verify", "yang-baxter", "--tol", "-1")[0] == cli.EXIT_CONFIG
    assert run(capsys, "verify", "bound-state", "--rho-kappa", "1.5pi")[0] == cli.EXIT_CONFIG
    assert run(capsys, "verify", "scattering", "--n", "1", "--rho-kappa", "1.5pi")[0] == cli.EXIT_CONFIG


def test_numerical_failure_exit_3(capsys):
    # G has a pole at z = i*a
    assert run(capsys, "eval", "gamma", "--z", "1j")[0] == cli.EXIT_NUMERICAL


def test_failed_check_exit_1(capsys):
    assert run(capsys, "verify", "yang-baxter", "--tol", "1e-30")[0] == cli.EXIT_FAILED


def test_verify_outputs_are_byte_identical(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        code, out = run(capsys, "verify", "yang-baxter", "--seed", "7", "--out", str(p))
        assert code == cli.EXIT_OK and "PASS" in out
    assert paths[0].read_bytes() == paths[1].read_bytes()
    doc = json.loads(paths[0].read_text())
    assert doc["build_id"] == cli.build_id() and doc["config"]["seed"] == 7
    assert doc["report"]["passed"] is True


def test_verify_csv_columns(tmp_path, capsys):
    p = tmp_path / "g.csv"
    assert run(capsys, "verify", "gamma-laws", "--out", str(p), "--format", "csv")[0] == cli.EXIT_OK
    text = p.read_text()
    assert text.startswith("# build_id=")
    rows = read_csv(text)
    assert tuple(rows[0]) == cli.VERIFY_COLUMNS and all(r["passed"] == "True" for r in rows)


def test_bound_state_verify(capsys):
    code, out = run(capsys, "verify", "bound-state", "--n", "0", "--rho-kappa", "2.36")
    assert code == cli.EXIT_OK, out


def test_breakdown_verify_single_point(capsys):
    code, out = run(capsys, "verify", "breakdown", "--n", "0", "--rho-kappa", "1.2")
    assert code == cli.EXIT_OK, out


@pytest.mark.parametrize("N", [0, 1, 2])
def test_energy_scan_stays_in_open_interval(capsys, N):
    code, out = run(capsys, "scan", "--axis", "a-minus", "--range", f"{0.5 * (N + 1)}:{2.5 * (N + 1)}:12",
                    "--predict-only", "--n", str(N), "--format", "csv")
    assert code == cli.EXIT_OK
    rows = read_csv(out)
    assert tuple(rows[0]) == cli.SCAN_COLUMNS
    energies = [float(r["energy"]) for r in rows if r["energy"]]
    assert energies and all(0 < e < 2 for e in energies)


def test_phase_diagram_scan_predictions(capsys):
    code, out = run(capsys, "scan", "--range", "0.5pi:3pi:10", "--predict-only", "--format", "csv")
    assert code == cli.EXIT_OK
    regimes = {r["regime"] for r in read_csv(out)}
    assert regimes == {"unitary", "bound-state"}


def test_scan_is_deterministic(tmp_path, capsys):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert run(capsys, "scan", "--range", "2:3:2", "--basis-size", "2", "--out", str(p),
                   "--format", "csv")[0] == cli.EXIT_OK
    assert paths[0].read_bytes() == paths[1].read_bytes()
    rows = read_csv(paths[0].read_text())
    assert all(int(r["adjoint_rank"]) == int(r["adjoint_rank_predicted"]) for r in rows)


def test_scan_marks_pole_edges():
    row = cli.scan_row(("rho-kappa", 1.5 * math.pi, 1, 1.0, True, 0, 2))
    assert row["regime"] == "boundary" and row["adjoint_rank_predicted"] is None
