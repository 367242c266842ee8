import csv
import io
import json
import math

import numpy as np
import pytest

from dipolephase.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def lookup(rows, method, quantity):
    (row,) = [r for r in rows if r["method"] == method and r["quantity"] == quantity]
    return float(row["value"])


def test_electric_table(capsys):
    with pytest.warns(RuntimeWarning, match="turned back"):
        code, out, _ = run(capsys, "electric", "--methods", "all")
    assert code == 0
    rows = rows_of(out)
    assert list(rows[0]) == ["method", "quantity", "value", "error_estimate"]
    assert lookup(rows, "ClosedForm", "delta_Y") == pytest.approx(-12.56637, abs=1e-5)
    assert lookup(rows, "ClosedForm", "delta_phi") == pytest.approx(-12.56637, abs=1e-5)
    assert lookup(rows, "Quadrature", "delta_phi_minus_closed_form") == pytest.approx(0.0, abs=1e-12)
    assert lookup(rows, "WkbNumeric", "delta_phi") == pytest.approx(-4 * math.pi, rel=1e-6)
    # the unit electric coupling is too strong for the charge to pass classically
    assert math.isnan(lookup(rows, "Trajectory", "delta_Y"))


def test_weak_electric_trajectory_column(capsys):
    code, out, _ = run(capsys, "electric", "--methods", "closed,trajectory",
                       "--set", f"electric.lambda={1e-4 / (4 * math.pi)!r}")
    assert code == 0
    rows = rows_of(out)
    closed = lookup(rows, "ClosedForm", "delta_Y")
    assert lookup(rows, "Trajectory", "delta_Y") == pytest.approx(closed, rel=1e-3)


def test_zero_dipole_table_is_all_zero(capsys):
    code, out, _ = run(capsys, "electric", "--set", "electric.lambda=0", "--methods", "closed,quadrature,wkb")
    assert code == 0
    assert all(float(r["value"]) == 0.0 for r in rows_of(out))
    code, out, _ = run(capsys, "magnetic", "--set", "solenoid.b0=0")
    assert code == 0
    assert all(float(r["value"]) == 0.0 for r in rows_of(out))
    assert "-0.0" not in out


def test_magnetic_table(capsys):
    code, out, _ = run(capsys, "magnetic")
    rows = rows_of(out)
    assert code == 0
    for method in ("ClosedForm", "Flux"):
        assert lookup(rows, method, "delta_phi") == pytest.approx(0.0917012, abs=1e-7)
    assert lookup(rows, "Trajectory", "delta_Y") == pytest.approx(lookup(rows, "ClosedForm", "delta_Y"), rel=1e-3)


def test_force_free_magnetic_table(capsys):
    _, out, _ = run(capsys, "magnetic")
    _, free_out, _ = run(capsys, "magnetic", "--set", "model.force_model=none")
    base, free = rows_of(out), rows_of(free_out)
    assert lookup(free, "Trajectory", "delta_Y") == 0.0
    assert lookup(free, "WkbNumeric", "delta_phi") == lookup(base, "WkbNumeric", "delta_phi")


def test_sweep_d_is_constant(capsys):
    code, out, _ = run(capsys, "sweep", "--param", "d", "--values", "0.5,1,2,5,10", "--methods", "closed")
    assert code == 0
    rows = rows_of(out)
    assert [float(r["d"]) for r in rows] == [0.5, 1.0, 2.0, 5.0, 10.0]
    dY = np.array([float(r["ClosedForm.delta_Y"]) for r in rows])
    assert np.ptp(dY) <= 1e-12 * abs(dY[0])


def test_sweep_v0_scaling(capsys):
    _, out, _ = run(capsys, "sweep", "--param", "v0", "--logspace", "0.1", "1", "5")
    rows = rows_of(out)
    v0 = np.array([float(r["v0"]) for r in rows])
    phi = np.array([float(r["WkbNumeric.delta_phi"]) for r in rows])
    assert np.polyfit(np.log(v0), np.log(-phi), 1)[0] == pytest.approx(-1.0, abs=1e-3)
    _, out, _ = run(capsys, "sweep", "--kind", "magnetic", "--param", "v0", "--values", "0.1,0.5,1")
    phi = np.array([float(r["ClosedForm.delta_phi"]) for r in rows_of(out)])
    assert np.ptp(phi) <= 1e-12 * abs(phi[0])


def test_sweep_parallel_matches_serial(capsys):
    args = ("sweep", "--param", "lambda", "--values", "0.3,0.1,0.2", "--methods", "closed,quadrature")
    _, serial, _ = run(capsys, *args)
    _, parallel, _ = run(capsys, *args, "--jobs", "2")
    assert serial == parallel


def test_output_files_and_manifest(tmp_path, capsys):
    out = tmp_path / "electric.csv"
    assert main(["electric", "--methods", "closed", "--out", str(out), "--seedless"]) == 0
    manifest = json.loads((tmp_path / "electric.csv.manifest.json").read_text())
    assert manifest["config"]["beam.v0"] == "1.0"
    assert manifest["seedless"] is True
    assert {"version", "timestamp", "argv"} <= set(manifest)
    first = out.read_text()
    assert main(["electric", "--methods", "closed", "--out", str(out)]) == 0
    assert out.read_text() == first


def test_structured_output(capsys):
    with pytest.warns(RuntimeWarning, match="turned back"):
        code, out, _ = run(capsys, "electric", "--format", "structured")
    doc = json.loads(out)
    assert doc["columns"] == ["method", "quantity", "value", "error_estimate"]
    assert doc["manifest"]["config"]["electric.lambda"] == "1.0"
    traj = [r for r in doc["rows"] if r[0] == "Trajectory"]
    assert traj and all(r[2] is None for r in traj)


@pytest.mark.parametrize("argv", [
    ["sweep", "--param", "mass", "--values", "1,2"],
    ["electric", "--set", "beam.v0=-1"],
    ["electric", "--set", "nonsense"],
    ["electric", "--methods", "magic"],
    ["electric", "--config", "/does/not/exist.ini"],
    ["bogus"],
    ["verify", "--only", "AC99"],
])
def test_usage_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_non_convergence_exit_3(capsys):
    code, _, err = run(capsys, "electric", "--methods", "quadrature",
                       "--set", "quad.rel_tol=1e-17", "--set", "quad.abs_tol=1e-300",
                       "--set", "quad.max_subdivisions=20")
    assert code == 3
    assert "convergence" in err


def test_verify_list(capsys):
    code, out, _ = run(capsys, "verify", "--list")
    assert code == 0
    assert len(out.strip().splitlines()) == 10


def test_verify_subset_passes(capsys):
    code, out, _ = run(capsys, "verify", "--only", "AC1,AC2,AC5,AC6")
    assert code == 0
    assert all(r["passed"] == "PASS" for r in rows_of(out))


def test_verify_loose_ode_tolerance_fails(capsys):
    code, out, _ = run(capsys, "verify", "--only", "AC3", "--set", "ode.local_error_tol=1e-2")
    assert code == 1
    assert rows_of(out)[0]["passed"] == "FAIL"
