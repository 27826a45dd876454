import copy
import csv
import json

import pytest

from fracpiezo import cli
from fracpiezo import presets as P
from fracpiezo.config import PRESET_NAMES, ConfigError, dump_config, parse_config, preset
from fracpiezo.mesh import build_mesh
from fracpiezo.solve import solve_converse
from fracpiezo.studies import METRIC_COLUMNS, PROFILE_COLUMNS, Cell

L = P.L_REF


def small(name="table2", **changes):
    cfg = preset(name)
    cfg["mesh"] = {"n_elements": [40], "n_inf": []}
    for key, value in changes.items():
        section, _, field = key.partition("__")
        if field:
            cfg[section][field] = value
        else:
            cfg[section] = value
    return cfg


def write(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_preset_round_trip(name):
    cfg = parse_config(preset(name))
    again = parse_config(json.loads(dump_config(cfg)))
    assert again == cfg
    assert dump_config(again) == dump_config(cfg)


def test_unknown_preset():
    with pytest.raises(ConfigError):
        preset("table9")


def test_missing_field_exit_code(tmp_path, capsys):
    cfg = small()
    del cfg["geometry"]["L"]
    code = cli.main(["run", write(tmp_path, cfg), "--out", str(tmp_path / "o")])
    assert code == cli.EXIT_CONFIG
    assert "geometry.L" in capsys.readouterr().err


def test_coarse_horizon_rejected(tmp_path, capsys):
    cfg = small(fractional__h_l=[L / 100])
    code = cli.main(["sweep", write(tmp_path, cfg), "--out", str(tmp_path / "o")])
    assert code == cli.EXIT_CONFIG
    assert "mesh" in capsys.readouterr().err


def test_bad_threads(tmp_path):
    assert cli.main(["sweep", "table2", "--threads", "0"]) == cli.EXIT_CONFIG


def test_local_only_grid_runs(tmp_path):
    cfg = small("layer-actuation", fractional={"alpha": [1.0], "h_l": [L / 5]})
    out = tmp_path / "o"
    assert cli.main(["run", write(tmp_path, cfg), "--out", str(out)]) == cli.EXIT_OK
    rows = read_rows(out / "metrics.csv")
    assert len(rows) == 1 and rows[0]["status"] == "ok"
    ref = solve_converse(P.layer_beam(1.0), build_mesh(L, 40), q0=100.0, phi0=100.0)
    assert float(rows[0]["w_max"]) == pytest.approx(abs(ref.deflections).max(), rel=1e-5)
    profile = next(out.glob("profile_*.csv"))
    with open(profile) as fh:
        assert fh.readline().strip().split(",") == list(PROFILE_COLUMNS)
    assert parse_config(json.loads((out / "config.json").read_text())) == parse_config(cfg)


def test_run_is_deterministic(tmp_path):
    path = write(tmp_path, small(fractional={"alpha": [0.8, 0.9], "h_l": [L / 5]}))
    a, b = tmp_path / "a", tmp_path / "b"
    assert cli.main(["run", path, "--out", str(a)]) == cli.EXIT_OK
    assert cli.main(["run", path, "--out", str(b), "--threads", "2"]) == cli.EXIT_OK
    assert (a / "metrics.csv").read_bytes() == (b / "metrics.csv").read_bytes()
    for prof in a.glob("profile_*.csv"):
        assert prof.read_bytes() == (b / prof.name).read_bytes()


def test_sweep_order_and_header(tmp_path):
    cfg = small(fractional={"alpha": [0.9, 0.7], "h_l": [L / 10, L / 5]})
    out = tmp_path / "o"
    assert cli.main(["sweep", write(tmp_path, cfg), "--out", str(out), "--threads", "3"]) == cli.EXIT_OK
    with open(out / "metrics.csv") as fh:
        assert fh.readline().strip().split(",") == list(METRIC_COLUMNS)
    rows = read_rows(out / "metrics.csv")
    assert [(float(r["alpha"]), float(r["h_l"])) for r in rows] == pytest.approx(
        [(0.9, L / 10), (0.9, L / 5), (0.7, L / 10), (0.7, L / 5)])
    assert all(float(r["v_rms"]) > 0 for r in rows)


def test_single_point_sweep(tmp_path):
    cfg = small(fractional={"alpha": [0.8], "h_l": [L / 5]})
    out = tmp_path / "o"
    cli.main(["sweep", write(tmp_path, cfg), "--out", str(out)])
    assert len(read_rows(out / "metrics.csv")) == 1


def test_sweep_electrode_pairs(tmp_path):
    cfg = small("table3", fractional={"alpha": [0.9], "h_l": [L / 5]})
    out = tmp_path / "o"
    cli.main(["sweep", write(tmp_path, cfg), "--out", str(out)])
    rows = read_rows(out / "metrics.csv")
    assert [r["electrodes"] for r in rows] == ["off", "on"]
    assert float(rows[1]["v_rms"]) < float(rows[0]["v_rms"])


def test_failed_point_recorded(tmp_path, monkeypatch):
    from fracpiezo import studies
    from fracpiezo.solve import SolverError

    real = studies.solve_direct

    def flaky(model, *args, **kwargs):
        if model.frac.alpha_m == 0.7:
            raise SolverError("forced")
        return real(model, *args, **kwargs)

    monkeypatch.setattr(studies, "solve_direct", flaky)
    cfg = small(fractional={"alpha": [0.9, 0.7], "h_l": [L / 5]})
    out = tmp_path / "o"
    cli.main(["sweep", write(tmp_path, cfg), "--out", str(out)])
    rows = read_rows(out / "metrics.csv")
    assert rows[0]["status"] == "ok" and rows[1]["status"].startswith("error")
    assert cli.main(["run", write(tmp_path, cfg), "--out", str(out)]) == cli.EXIT_FAIL


def test_converge_flags_first_density(tmp_path, capsys):
    cfg = preset("fig2-convergence")
    cfg["mesh"] = {"n_elements": [], "n_inf": [5, 10, 20]}
    out = tmp_path / "o"
    assert cli.main(["converge", write(tmp_path, cfg), "--out", str(out)]) == cli.EXIT_OK
    rows = read_rows(out / "convergence.csv")
    assert [float(r["n_inf"]) for r in rows] == [5, 10, 20]
    flagged = [float(r["n_inf"]) for r in rows if r["converged"] == "yes"]
    assert flagged and flagged[0] <= 10
    assert float(rows[1]["rel_change"]) < 0.01
    assert "converged at N_inf" in capsys.readouterr().out


def test_converge_needs_two_densities(tmp_path, capsys):
    cfg = preset("fig2-convergence")
    cfg["mesh"] = {"n_elements": [], "n_inf": [10]}
    assert cli.main(["converge", write(tmp_path, cfg), "--out", str(tmp_path / "o")]) == cli.EXIT_CONFIG
    assert "'mesh'" in capsys.readouterr().err


def test_validate_exit_code_follows_cells(tmp_path, monkeypatch):
    cells = [Cell("table2", "x", 1.0, 1.001, 5e-3, True)]
    monkeypatch.setattr(cli, "validation_suite", lambda *a, **k: cells)
    assert cli.main(["validate", "--table", "2", "--out", str(tmp_path)]) == cli.EXIT_OK
    assert "PASS" in (tmp_path / "validation_report.txt").read_text()
    cells.append(Cell("table2", "y", 1.0, 1.1, 5e-3, True))
    assert cli.main(["validate", "--out", str(tmp_path)]) == cli.EXIT_FAIL


def test_preset_command(capsys):
    assert cli.main(["preset", "table4"]) == cli.EXIT_OK
    cfg = json.loads(capsys.readouterr().out)
    assert cfg["bc"] == "cantilever" and cfg["patch"]["L_P"] == pytest.approx(0.3 * L)


def test_grid_does_not_mutate_preset():
    a = preset("table2")
    b = copy.deepcopy(a)
    parse_config(a)
    assert a == b


@pytest.mark.parametrize("name", PRESET_NAMES)
def test_shipped_configs_match_presets(name):
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "configs" / f"{name}.json"
    assert parse_config(json.loads(path.read_text())) == parse_config(preset(name))
