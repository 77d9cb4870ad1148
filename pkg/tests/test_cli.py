import csv
import json

import pytest

from stirap_open.cli import main
from stirap_open.experiments import EfficiencyRecord
from stirap_open.serialize import RECORD_COLUMNS, read_records, write_records

REC = EfficiencyRecord("counterintuitive", "microscopic", 0.123456789012345, 1.0, 0.0,
                       0.998112233445566, 3.2e-15, -1.1e-17)
FAST = ["--h", "4e-3", "--samples", "30"]


def test_empty_records_give_header_only(tmp_path):
    path = tmp_path / "r.csv"
    write_records([], "csv", path)
    assert path.read_text().splitlines() == [",".join(RECORD_COLUMNS)]


def test_one_record_gives_two_lines(tmp_path):
    path = tmp_path / "r.csv"
    write_records([REC], "csv", path)
    assert len(path.read_text().splitlines()) == 2


@pytest.mark.parametrize("fmt", ["csv", "json"])
def test_round_trip_to_twelve_digits(tmp_path, fmt):
    path = tmp_path / f"r.{fmt}"
    write_records([REC], fmt, path)
    (back,) = read_records(path)
    for col in RECORD_COLUMNS[2:]:
        assert getattr(back, col) == pytest.approx(getattr(REC, col), rel=1e-11)
    assert back.key[:2] == REC.key[:2]


def test_simulate_closed_system(tmp_path, capsys):
    out = tmp_path / "traj.json"
    code = main(["simulate", "--sequence", "ci", "--gamma", "0", "--omega0", "25", "--tau", "1.5",
                 "--delta", "1", "-o", str(out), *FAST])
    assert code == 0
    data = json.loads(out.read_text())
    assert data["rho33"][-1] >= 0.99
    assert data["rho_final_real"][2][2] >= 0.99


def test_simulate_csv_with_gnuplot_script(tmp_path):
    out = tmp_path / "traj.csv"
    assert main(["simulate", "--gamma", "1", "-o", str(out), "--gnuplot-script", *FAST]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 30
    assert out.with_suffix(".gp").exists()


def test_sweep_gamma_row_count(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep-gamma", "--sequence", "ci", "--model", "both", "-o", str(out),
                 "--h", "1e-2"]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 80
    assert tuple(rows[0]) == RECORD_COLUMNS


def test_compare_writes_summary(tmp_path):
    summary = tmp_path / "s.json"
    assert main(["compare", "--gammas", "0.1", "1", "-o", str(tmp_path / "c.csv"),
                 "--summary", str(summary), *FAST]) == 0
    assert json.loads(summary.read_text())["points"] == 2


def test_verify_passes(capsys):
    assert main(["verify"]) == 0
    assert "FAIL" not in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["simulate", "--delta", "0"],
    ["simulate", "--gamma", "-1"],
    ["simulate", "--sequence", "sideways"],
    ["simulate", "--model", "phenomenological", "--n-photons", "2"],
    ["simulate", "--h", "0"],
    ["sweep-gamma", "--gamma-min", "0"],
    ["sweep-gamma", "--gammas", "-1", "1"],
    ["sweep-gamma-alpha", "--alpha-points", "0"],
    ["sweep-gamma-n", "--n-min", "-1"],
    ["sweep-gamma", "--jobs", "0"],
    ["compare", "--omega0", "-3"],
    ["bogus"],
])
def test_invalid_configs_exit_before_compute(argv, monkeypatch, tmp_path):
    import stirap_open.cli as cli

    def boom(*a, **k):
        raise AssertionError("compute reached")

    for name in ("evolve", "sweep_gamma", "sweep_gamma_alpha", "sweep_gamma_n", "compare_models"):
        monkeypatch.setattr(cli, name, boom)
    monkeypatch.chdir(tmp_path)
    with pytest.raises(SystemExit) as exc:
        raise SystemExit(main(argv))
    assert exc.value.code == 2


def test_numerical_failure_exits_one(tmp_path, monkeypatch, capsys):
    import stirap_open.cli as cli
    from stirap_open.integrator import IntegrationError

    def fail(*a, **k):
        raise IntegrationError("negative eigenvalue -1e-3", t=0.25)

    monkeypatch.setattr(cli, "evolve", fail)
    assert main(["simulate", "-o", str(tmp_path / "x.csv")]) == 1
    assert "t=0.25" in capsys.readouterr().err
