import json

import pytest

from nmentangle.cli import main, panel_spec
from nmentangle.csvio import read_csv


def test_simulate_stdout(capsys):
    assert main(["simulate", "--Q", "1", "--R", "1", "--t-max", "1", "--samples", "3"]) == 0
    rows = read_csv(capsys.readouterr().out)
    assert len(rows) == 3
    assert rows[-1]["concurrence"] == pytest.approx(0.841465696, abs=1e-9)


def test_simulate_to_file_with_metadata(tmp_path):
    out = tmp_path / "run.csv"
    code = main(
        ["simulate", "--Q", "5", "--R", "0.04", "--mode", "exact-paper", "--samples", "20", "--out", str(out)]
    )
    assert code == 0
    meta = json.loads((tmp_path / "run.csv.meta.json").read_text())
    assert meta["evolution_mode"] == "paper-literal"
    assert "samples" not in meta["defaults_used"] and "theta" in meta["defaults_used"]
    assert meta["regime_thresholds"]["nonmarkovian_min_Q"] == 5.0
    assert len(read_csv(out.read_text())) == 20


def test_simulate_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("Q = 0, 10\nR = 1\nsamples = 4\ntime_axis = tau-prime\n")
    assert main(["simulate", "--config", str(cfg)]) == 2
    cfg.write_text("Q = 1, 10\nR = 1\nsamples = 4\ntime_axis = tau-prime\n")
    assert main(["simulate", "--config", str(cfg)]) == 0
    rows = read_csv(capsys.readouterr().out)
    assert [r["Q"] for r in rows] == [1.0] * 4 + [10.0] * 4


def test_usage_errors(capsys):
    assert main(["simulate", "--Q", "1", "--J", "1"]) == 2
    assert "overdetermined" in capsys.readouterr().err
    assert main(["simulate", "--Q", "1", "--R", "1", "--samples", "1"]) == 2
    assert main(["sweep", "--config", "/nonexistent/file.cfg"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--mode", "bogus"])
    assert exc.value.code == 2


def test_sweep_command(tmp_path):
    cfg = tmp_path / "sweep.cfg"
    out = tmp_path / "sweep.csv"
    cfg.write_text(f"Q = 0, 1\nR = 0.1, 10\nsamples = 5\nt_max = 2\noutput = {out}\nworkers = 2\n")
    assert main(["sweep", "--config", str(cfg)]) == 0
    rows = read_csv(out.read_text())
    assert len(rows) == 20
    assert {r["regime"] for r in rows} == {"markovian", "intermediate"}


def test_figure_panels(tmp_path):
    assert main(["figure", "--panel", "a", "c", "--out", str(tmp_path)]) == 0
    rows = read_csv((tmp_path / "panel_c.csv").read_text())
    assert len(rows) == 4 * 500
    assert {r["time_axis"] for r in rows} == {"tau-prime"}
    assert {r["R"] for r in rows} == {0.01}
    meta = json.loads((tmp_path / "panel_a.csv.meta.json").read_text())
    assert meta["Q"] == [0.0, 1.0, 5.0, 20.0] and meta["panel"] == "a"
    assert not (tmp_path / "panel_b.csv").exists()


def test_panel_presets():
    assert panel_spec("a").R_values == (100.0,) and panel_spec("a").time_axis == "tau"
    assert panel_spec("b").R_values == (1.0,)
    assert panel_spec("d").R_values == (0.001,) and panel_spec("d").time_axis == "tau-prime"
    assert len(panel_spec("b").times) == 500
