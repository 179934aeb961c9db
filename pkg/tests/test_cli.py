import csv
import io
import json
import math

import numpy as np
import pytest

from tfim_magic import cli
from tfim_magic.entropy import CRITICAL_SLOPE_JUMP, FERRO_M2_DENSITY
from tfim_magic.spectrum import read_histogram_csv


def run(args, capsys):
    code = cli.main(args)
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_grid_parsing():
    assert len(cli.parse_grid("0:2:0.01")) == 201
    assert cli.parse_grid("0:1:0.3") == [0.0, 0.3, 0.6, 0.9]
    assert cli.parse_grid("0:1.04:0.1")[-1] == 1.0
    assert cli.parse_grid("0:0.96:0.1")[-1] == 1.0
    assert cli.parse_grid("0:1:0.4") == [0.0, 0.4, 0.8]
    assert cli.parse_grid("0.5,1,2") == [0.5, 1.0, 2.0]
    assert cli.parse_sizes("8:64") == [8, 16, 32, 64]
    for bad in ("0:1:0", "1:0:0.1", "a", ",", "0:1"):
        with pytest.raises(cli.UsageError):
            cli.parse_grid(bad)


def test_entropy_scan(capsys):
    code, out, _ = run(["entropy", "--n-sites", "2000", "--g", "0:2:0.01"], capsys)
    assert code == 0
    table = rows(out)
    assert len(table) == 201
    assert list(table[0]) == ["N", "g", "n", "M_n", "M_n_per_site"]
    flat = [float(r["M_n_per_site"]) for r in table if float(r["g"]) <= 0.9]
    np.testing.assert_allclose(flat, FERRO_M2_DENSITY, atol=1e-3)


def test_entropy_examples(capsys):
    _, out, _ = run(["entropy", "--n-sites", "2", "--g", "1"], capsys)
    (row,) = rows(out)
    assert float(row["M_n"]) == pytest.approx(math.log(4 / 3), abs=1e-15)
    _, out, _ = run(["entropy", "--n-sites", "2000", "--g", "1e6"], capsys)
    assert float(rows(out)[0]["M_n_per_site"]) < 1e-12


def test_entropy_several_indices(capsys):
    _, out, _ = run(["entropy", "--n-sites", "100,50", "--g", "0.5,1.5", "--renyi", "3,2"], capsys)
    table = rows(out)
    keys = [(int(r["N"]), float(r["g"]), float(r["n"])) for r in table]
    assert len(keys) == 8 and keys == sorted(keys)


@pytest.mark.parametrize(
    "args",
    [
        ["entropy", "--n-sites", "3", "--g", "1"],
        ["entropy", "--n-sites", "4", "--g", "0:1:0"],
        ["entropy", "--n-sites", "4", "--g", "-1"],
        ["entropy", "--n-sites", "4", "--renyi", "1"],
        ["oracle", "--n-sites", "3", "--g", "1"],
        ["hist", "--n-sites", "4", "--g", "1", "--method", "sample", "--samples", "0"],
        ["hist", "--n-sites", "40", "--g", "1", "--method", "exact"],
        ["hist", "--n-sites", "4", "--g", "1", "--delta", "0"],
        ["gap", "--g", "1"],
    ],
)
def test_validation_errors_exit_2(args, capsys):
    code, out, err = run(args, capsys)
    assert code == cli.EXIT_INVALID
    assert "error" in err and out == ""


def test_oracle_report(capsys):
    code, out, _ = run(["oracle", "--n-sites", "6", "--g", "1.2"], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["passed"] and rep["max_abs_deviation"] < 1e-12

    code, out, _ = run(["oracle", "--n-sites", "8", "--g", "0"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["realspace_m2_per_site"] == pytest.approx(0.0, abs=1e-12)
    assert rep["momentum_m2_per_site"] > 0


def test_oracle_failure_exit_3(capsys, monkeypatch):
    real = cli.oracle.verify

    def broken(params):
        rep = real(params)
        rep["checks"]["m2_match"] = False
        rep["passed"] = False
        rep["failed_checks"] = ["m2_match"]
        return rep

    monkeypatch.setattr(cli.oracle, "verify", broken)
    code, _, err = run(["oracle", "--n-sites", "4", "--g", "0.5"], capsys)
    assert code == cli.EXIT_VERIFY_FAILED
    assert "m2_match" in err


def test_gap_doubling(capsys):
    _, out, _ = run(["gap", "--n-doubling", "8:2048", "--g", "0.5"], capsys)
    gaps = [float(r["magic_gap"]) for r in rows(out)]
    assert len(gaps) == 9 and np.all(np.diff(gaps) < 0)
    _, out, _ = run(["gap", "--n-sites", "2", "--g", "0"], capsys)
    assert float(rows(out)[0]["magic_gap"]) == 1.0
    _, out, _ = run(["gap", "--n-sites", "2000", "--g", "0.5"], capsys)
    assert float(rows(out)[0]["magic_gap"]) < 1e-4


def test_thermo_commands(capsys):
    _, out, _ = run(["thermo", "--g", "0:0.9:0.1"], capsys)
    table = rows(out)
    assert list(table[0]) == ["g", "n", "per_site", "quadrature_error"]
    np.testing.assert_allclose([float(r["per_site"]) for r in table], FERRO_M2_DENSITY, atol=1e-8)

    _, out, _ = run(["thermo", "--g", "100"], capsys)
    assert float(rows(out)[0]["per_site"]) * 4e4 == pytest.approx(1.0, rel=1e-2)

    _, out, _ = run(["thermo", "--derivative", "--g", "1"], capsys)
    (row,) = rows(out)
    assert float(row["right_extrap"]) == pytest.approx(CRITICAL_SLOPE_JUMP, abs=1e-2)
    assert float(row["left_extrap"]) == pytest.approx(0.0, abs=1e-2)


def test_thermo_reports_nonconvergence(capsys, monkeypatch):
    from tfim_magic.entropy import ThermoDensity

    monkeypatch.setattr(cli.entropy, "thermo_density",
                        lambda g, n: ThermoDensity(g, n, 0.1, 1e-3, converged=False))
    code, out, err = run(["thermo", "--g", "0.5,0.6"], capsys)
    assert code == 0
    assert len(rows(out)) == 2
    assert err.count("not converged") == 2


def test_hist_csv_round_trip(tmp_path, capsys):
    path = tmp_path / "h.csv"
    code, _, _ = run(["hist", "--n-sites", "12", "--g", "0.5", "--method", "exact",
                      "--out", str(path)], capsys)
    assert code == 0
    h = read_histogram_csv(path.open())
    assert h.N == 12 and h.total_mass() == pytest.approx(1.0, abs=1e-12)


def test_hist_sample_is_byte_identical(tmp_path, capsys):
    args = ["hist", "--n-sites", "40", "--g", "0.4", "--method", "sample",
            "--samples", "100000", "--seed", "7"]
    a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    run(args + ["--out", str(a)], capsys)
    run(args + ["--out", str(b)], capsys)
    run(args[:-1] + ["8", "--out", str(c)], capsys)
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes() != c.read_bytes()


def test_hist_x_domain_second_peak(capsys):
    _, out, _ = run(["hist", "--n-sites", "40", "--g", "2", "--x-bins", "50"], capsys)
    body = [ln for ln in out.splitlines() if not ln.startswith("#")]
    w = np.array([float(r["weight"]) for r in rows("\n".join(body))])
    assert w.sum() == pytest.approx(1.0)
    from tfim_magic.spectrum import local_maxima

    peaks = local_maxima(w)
    assert peaks[0] <= 2 and any(i >= 20 for i in peaks)


def test_json_format(capsys):
    _, out, _ = run(["entropy", "--n-sites", "4", "--g", "0.5", "--format", "json"], capsys)
    data = json.loads(out)
    assert data[0]["N"] == 4 and data[0]["n"] == 2.0


def test_entropy_rerun_identical(tmp_path, capsys):
    args = ["entropy", "--n-sites", "64", "--g", "0:3:0.25", "--renyi", "2,3,4"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(args + ["--out", str(a)], capsys)
    run(args + ["--out", str(b)], capsys)
    assert a.read_bytes() == b.read_bytes()
    for r in rows(a.read_text()):
        assert float(repr(float(r["M_n"]))) == float(r["M_n"])
