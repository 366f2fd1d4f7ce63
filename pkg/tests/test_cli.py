import json

import pytest

from spinor_spectra.cli import run

FREE = ["--radial", "coulomb", "--v0lambda", "0.2", "--angular", "f1", "--alpha", "0",
        "--beta", "0", "--gamma", "0", "--m", "0", "--n-r", "0", "--n-theta", "0"]


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_spectrum_example(capsys):
    code, out, _ = call(capsys, "spectrum", *FREE)
    assert code == 0
    data = json.loads(out)
    assert set(data) == {"epsilon", "rho", "l_effective", "s", "lambda", "tau_or_omega",
                         "converged", "iterations"}
    assert data["epsilon"] == pytest.approx(0.98019802, abs=1e-8)
    assert data["rho"] == 0
    assert data["lambda"] == [0.0, 0.0]


def test_json_round_trip(capsys):
    _, out, _ = call(capsys, "spectrum", "--radial", "oscillator", "--k", "0.5",
                     "--angular", "f3", "--alpha", "0.05", "--beta", "0.02")
    data = json.loads(out)
    assert json.loads(json.dumps(data, indent=2)) == data
    assert data["lambda"][1] != 0
    assert data["tau_or_omega"] > 0


def test_invalid_l_exit_code(capsys):
    code, out, err = call(capsys, "wavefunction", "--factor", "radial", "--samples", "5",
                          "--l", "-1")
    assert code == 2
    assert "l > -1 required" in err
    assert out == ""


def test_json_error_object(capsys):
    code, out, err = call(capsys, "wavefunction", "--factor", "radial", "--samples", "5",
                          "--l", "-1", "--format", "json")
    assert code == 2
    payload = json.loads(out)
    assert payload["error"] == "validation"
    assert "l > -1 required" in payload["violations"]
    assert err.startswith("error:")


def test_radial_csv_schema(capsys):
    code, out, _ = call(capsys, "wavefunction", "--factor", "radial", "--samples", "5", *FREE)
    assert code == 0
    assert "\r" not in out
    lines = out.split("\n")
    assert lines[0] == "r,u_re,u_im"
    assert lines[-1] == "" and len(lines) == 7
    first = lines[1].split(",")
    assert len(first) == 3
    assert float(first[2]) == 0.0


@pytest.mark.parametrize("factor, header", [("angular", "theta,theta_re,theta_im"),
                                            ("azimuthal", "phi,phi_re,phi_im")])
def test_other_factor_headers(capsys, factor, header):
    code, out, _ = call(capsys, "wavefunction", "--factor", factor, "--samples", "4",
                        "--m", "1")
    assert code == 0
    assert out.splitlines()[0] == header
    assert len(out.splitlines()) == 5


def test_seventeen_significant_digits(capsys):
    _, out, _ = call(capsys, "wavefunction", "--factor", "azimuthal", "--samples", "3")
    value = out.splitlines()[1].split(",")[1]
    assert value == format(0.3989422804014327, ".17g")


def test_f3_angular_is_complex(capsys):
    _, out, _ = call(capsys, "wavefunction", "--factor", "angular", "--angular", "f3",
                     "--alpha", "0.0625", "--beta", "0.2", "--eta", "1", "--samples", "6")
    imag = [float(line.split(",")[2]) for line in out.splitlines()[1:]]
    assert any(v != 0 for v in imag)


def test_wavefunction_json(capsys):
    _, out, _ = call(capsys, "wavefunction", "--factor", "radial", "--samples", "4",
                     "--format", "json", "--xmin", "0.5", "--xmax", "2")
    data = json.loads(out)
    assert set(data) == {"r", "u_re", "u_im"}
    assert data["r"][0] == 0.5 and data["r"][-1] == 2.0


def test_angular_rejects_domain_override(capsys):
    code, _, err = call(capsys, "wavefunction", "--factor", "angular", "--xmin", "-0.5",
                        "--eta", "1")
    assert code == 2


def test_bound(capsys):
    code, out, _ = call(capsys, "bound", "--angular", "f1", "--alpha", "0.01",
                        "--v0lambda", "0.2")
    data = json.loads(out)
    assert code == 0 and data["satisfied"]
    assert data["epsilon"] <= data["bound"]


def test_bound_needs_nonzero_alpha(capsys):
    code, out, err = call(capsys, "bound", "--angular", "f1", "--eta", "1")
    assert code == 2


def test_config_file_and_flag_precedence(capsys, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"radial": "coulomb", "v0lambda": 2.0, "n-r": 0, "m": 1}))
    _, out, _ = call(capsys, "spectrum", "--config", str(cfg))
    from_file = json.loads(out)
    _, out, _ = call(capsys, "spectrum", "--config", str(cfg), "--v0lambda", "0.2")
    overridden = json.loads(out)
    assert from_file["l_effective"] == pytest.approx(1.0)
    tau = 2.0 / 4
    assert from_file["epsilon"] == pytest.approx((1 - tau**2) / (1 + tau**2))
    assert overridden["tau_or_omega"] == pytest.approx(0.2 / 4)


def test_config_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"wobble": 1}))
    code, _, err = call(capsys, "spectrum", "--config", str(cfg))
    assert code == 2 and "wobble" in err


def test_missing_config_is_io_error(capsys, tmp_path):
    code, _, _ = call(capsys, "spectrum", "--config", str(tmp_path / "nope.json"))
    assert code == 1


def test_unwritable_output_is_io_error(capsys, tmp_path):
    code, _, err = call(capsys, "spectrum", "--out", str(tmp_path / "missing" / "x.json"))
    assert code == 1 and "cannot write" in err


def test_out_file_matches_stdout(capsys, tmp_path):
    target = tmp_path / "u.csv"
    call(capsys, "wavefunction", "--samples", "7", "--out", str(target))
    _, out, _ = call(capsys, "wavefunction", "--samples", "7")
    assert target.read_bytes() == out.encode()


def test_convergence_failure_exit_code(capsys):
    code, out, _ = call(capsys, "spectrum", "--angular", "f2", "--gamma", "-10",
                        "--format", "json")
    assert code == 3
    assert json.loads(out)["error"] == "convergence"


def test_spectrum_csv(capsys):
    code, out, _ = call(capsys, "spectrum", "--format", "csv", *FREE)
    header, row = out.splitlines()
    assert header.split(",")[:2] == ["epsilon", "rho"]
    assert "lambda_re" in header and row.endswith("true,1")


def test_verify_single_suite(capsys):
    code, out, _ = call(capsys, "verify", "--suite", "special", "--format", "json")
    assert code == 0
    results = json.loads(out)
    assert [r["key"] for r in results] == ["C9"]
    assert all(r["passed"] for r in results)


def test_verify_failure_exit_code(capsys):
    code, out, _ = call(capsys, "verify", "--suite", "angular", "--tol", "1e-14")
    assert code == 3
    assert "[FAIL] C3" in out


def test_log_env(capsys, monkeypatch):
    monkeypatch.setenv("SPINOR_SPECTRA_LOG", "debug")
    code, _, _ = call(capsys, "spectrum", *FREE)
    assert code == 0
