import json
import math

import pytest

from dpp_scaling.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def csv_rows(text):
    lines = text.splitlines()
    assert lines[0].startswith("# config: ")
    header = lines[1].split(",")
    return json.loads(lines[0][len("# config: "):]), header, [l.split(",") for l in lines[2:]]


def as_dict(rows):
    return {r[0]: r[1] for r in rows}


def test_info_gue(capsys):
    code, out, _ = run(capsys, "info")
    assert code == 0
    cfg, header, rows = csv_rows(out)
    assert cfg["command"] == "info" and header == ["quantity", "value"]
    d = as_dict(rows)
    assert float(d["kappa"]) == 0.5 and float(d["kappa_prime"]) == 0.5
    assert float(d["kappa_dprime"]) == 0.0 and float(d["omega"]) == 2.0


def test_info_lue_ratio(capsys):
    code, out, _ = run(capsys, "info", "--ensemble", "lue", "--theta", "4")
    assert code == 0
    d = as_dict(csv_rows(out)[2])
    assert float(d["t_minus"]) == pytest.approx(1.0, rel=1e-14)
    assert float(d["t_plus"]) == pytest.approx(9.0, rel=1e-14)


def test_info_jue_hard_edges(capsys):
    code, out, _ = run(capsys, "info", "--ensemble", "jue", "--theta", "0.5", "--tau", "0.5")
    assert code == 0
    d = as_dict(csv_rows(out)[2])
    assert "lower@0.0" in d["hard_edges"] and "upper@1.0" in d["hard_edges"]
    assert d["soft(+)"].startswith("unavailable")


def test_kernel_bulk_table(capsys):
    code, out, _ = run(capsys, "kernel", "--regime", "bulk", "--t", "0", "--n", "100")
    assert code == 0
    _, header, rows = csv_rows(out)
    assert header == ["xi", "eta", "K_n", "K_limit", "abs_error"]
    assert len(rows) == 25
    vals = [[float(v) for v in r] for r in rows]
    assert all(math.isfinite(v) for r in vals for v in r)
    for xi, eta, _, lim, _ in vals:
        if xi == eta:
            assert lim == 1.0


def test_kernel_error_decreases_with_n(capsys):
    errs = []
    for n in ["50", "100"]:
        _, out, _ = run(capsys, "kernel", "--regime", "bulk", "--t", "0", "--n", n)
        errs.append(max(float(r[4]) for r in csv_rows(out)[2]))
    assert errs[1] < errs[0]


def test_kernel_grid_escaping_support(capsys):
    code, _, err = run(capsys, "kernel", "--ensemble", "lue", "--alpha", "0", "--regime", "hard",
                       "--grid", "-2", "1", "1")
    assert code == 2
    assert err.count("\n") == 1


def test_density_mass_row(capsys):
    code, out, _ = run(capsys, "density", "--n", "200", "--grid", "-1.5", "1.5", "0.1")
    assert code == 0
    _, header, rows = csv_rows(out)
    assert header[:3] == ["t", "rho_n", "rho"]
    mass = rows[-1]
    assert mass[0] == "mass"
    assert abs(float(mass[1]) - 1) <= 1e-8 and abs(float(mass[2]) - 1) <= 1e-8
    assert max(float(r[3]) for r in rows[:-1]) <= 0.02


def test_density_jue_unscaled(capsys):
    code, out, _ = run(capsys, "density", "--ensemble", "jue", "--theta", "0.5", "--tau", "0.25",
                       "--n", "40", "--grid", "0.1", "0.9", "0.2")
    assert code == 0
    rows = csv_rows(out)[2]
    # no t-rescaling: the grid is reported verbatim
    assert [r[0] for r in rows[:-1]] == ["0.1", "0.30000000000000004", "0.5",
                                         "0.7000000000000001", "0.9"]


def test_density_drops_points_with_warning(capsys):
    code, out, err = run(capsys, "density", "--ensemble", "lue", "--theta", "4", "--n", "40",
                         "--grid", "-1", "3", "1")
    assert code == 0
    assert "warning" in err
    ts = [r[0] for r in csv_rows(out)[2][:-1]]
    assert "-1.0" not in ts


def test_gap_dyson(capsys):
    code, out, _ = run(capsys, "gap", "--kernel", "dyson", "--interval", "0", "0.01")
    assert code == 0
    d = as_dict(csv_rows(out)[2])
    assert abs(float(d["E_dyson"]) - 0.99) <= 1e-4


def test_gap_airy_with_trace_check(capsys):
    code, out, _ = run(capsys, "gap", "--kernel", "airy", "--interval", "-2", "38")
    assert code == 0
    rows = csv_rows(out)[2]
    d = as_dict(rows)
    assert float(d["E_airy"]) == pytest.approx(0.41322414250512, abs=1e-12)
    assert float(d["trace"]) == pytest.approx(float(d["tau_trace"]), abs=1e-7)


def test_gap_bessel(capsys):
    code, out, _ = run(capsys, "gap", "--kernel", "bessel", "--alpha", "0", "--interval", "0", "1")
    assert code == 0
    value = float(as_dict(csv_rows(out)[2])["E_bessel"])
    assert 0 < value < 1
    assert value == pytest.approx(math.exp(-0.25), rel=1e-13)


def test_converge_gue_bulk(capsys):
    code, out, _ = run(capsys, "converge", "--regime", "bulk", "--t", "0",
                       "--n-list", "25,50,100")
    assert code == 0
    _, header, rows = csv_rows(out)
    assert header == ["n", "target", "grid_error", "diag_error", "trace_gap", "gap_error"]
    for col in range(2, 6):
        vals = [float(r[col]) for r in rows]
        assert vals[-1] < vals[0]


def test_converge_lue_hard_json(capsys):
    code, out, _ = run(capsys, "converge", "--ensemble", "lue", "--alpha", "0", "--regime", "hard",
                       "--n-list", "25", "50", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"config", "columns", "rows"}
    assert doc["config"]["n_list"] == [25, 50]
    assert [r[1] for r in doc["rows"]] == ["bessel(0.0)", "bessel(0.0)"]


@pytest.mark.parametrize("argv", [
    ["converge", "--n-list"],
    ["info", "--ensemble", "lue", "--theta", "-1"],
    ["info", "--ensemble", "jue", "--theta", "0.5"],
    ["kernel", "--regime", "soft", "--ensemble", "jue", "--theta", "0.5", "--tau", "0.5"],
    ["gap", "--interval", "1", "0", "--kernel", "dyson"],
    ["bogus"],
    ["info", "--format", "xml"],
])
def test_usage_errors(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    assert out == ""
    assert err.strip() and err.count("\n") == 1


def test_bad_thread_env(capsys, monkeypatch):
    monkeypatch.setenv("DPP_SCALING_THREADS", "zero")
    assert run(capsys, "info")[0] == 2


def test_determinism_and_threads(capsys, monkeypatch):
    argv = ["converge", "--regime", "bulk", "--t", "0", "--n-list", "10,20,40"]
    first = run(capsys, *argv)[1]
    assert run(capsys, *argv)[1] == first
    monkeypatch.setenv("DPP_SCALING_THREADS", "4")
    assert run(capsys, *argv)[1] == first


def test_out_file(capsys, tmp_path):
    path = tmp_path / "k.json"
    code, out, _ = run(capsys, "kernel", "--regime", "soft", "--side", "+", "--n", "50",
                       "--format", "json", "--out", str(path))
    assert code == 0 and out == ""
    doc = json.loads(path.read_text())
    assert doc["columns"][0] == "xi" and len(doc["rows"]) == 25
    # floats round-trip exactly
    again = json.loads(json.dumps(doc))
    assert again == doc


def test_module_entry_point():
    import subprocess
    import sys
    res = subprocess.run([sys.executable, "-m", "dpp_scaling", "info"], capture_output=True,
                         text=True, check=False)
    assert res.returncode == 0
    assert res.stdout.startswith("# config: ")
