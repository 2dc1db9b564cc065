import math

import numpy as np
import pytest

from qudit_gcdd import cli, plotting
from qudit_gcdd.config import build, dump, load_config, read_text
from qudit_gcdd.errors import ConfigError
from qudit_gcdd.report import read_schedule_csv, schedule_columns

SMALL = """
[run]
mode = sweep
output_dir = {out}
[gate]
name = hadamard
tau = 1.0
[grid]
n_steps = 1280
[sweep]
n_values = 1, 2
"""


def cfg_from(text):
    return build(read_text(text))


def test_fig2_preset_values():
    cfg = load_config(preset="fig2")
    assert cfg.mode == "sweep" and cfg.d == 3 and cfg.seed == 12345
    assert cfg.gate.name == "hadamard" and cfg.gate.tau == 1.0
    assert cfg.bath.alpha == 0.1
    assert math.isclose(cfg.bath.tau_c, 0.25)
    assert math.isclose(cfg.bath.beta * cfg.bath.omega_c, 1.0)
    assert cfg.n_values == (2, 4, 16)
    assert cfg.grid.n_steps == 10240
    assert math.isclose(cfg.grid.memory_window, 2.0)


def test_missing_gate_section():
    with pytest.raises(ConfigError) as exc:
        cfg_from("[run]\nmode = sweep\n")
    assert exc.value.field == "gate"


def test_unknown_key_and_section():
    with pytest.raises(ConfigError, match="bath.alhpa"):
        cfg_from("[gate]\nname = hadamard\n[bath]\nalhpa = 0.1\n")
    with pytest.raises(ConfigError) as exc:
        cfg_from("[gate]\nname = hadamard\n[extra]\nx = 1\n")
    assert exc.value.field == "extra"


def test_parse_error_reports_line():
    with pytest.raises(ConfigError) as exc:
        read_text("[gate]\nname = hadamard\nthis line is broken\n")
    assert exc.value.line == 3
    assert "line 3" in str(exc.value)


def test_bad_value_reports_field():
    with pytest.raises(ConfigError, match="grid.n_steps"):
        cfg_from("[gate]\nname = hadamard\n[grid]\nn_steps = many\n")


def test_n_accepted_whenever_tau_is_a_whole_number_of_periods():
    # n = 2.5 gives t0 = 0.1 and tau / t0 = 10
    cfg = cfg_from("[gate]\nname = hadamard\n[sweep]\nn_values = 2.5\n")
    assert cfg.n_values == (2.5,)


def test_odd_n_accepted_when_integral():
    cfg = cfg_from("[gate]\nname = hadamard\n[sweep]\nn_values = 3\n")
    assert cfg.n_values == (3,)


def test_non_integral_n_rejected():
    with pytest.raises(ConfigError, match="sweep.n_values"):
        cfg_from("[gate]\nname = hadamard\n[sweep]\nn_values = 2.3\n")


def test_coarse_grid_rejected_in_config():
    with pytest.raises(ConfigError, match="need n_steps >= 2560"):
        cfg_from("[gate]\nname = hadamard\n[grid]\nn_steps = 2000\n")


def test_qutrit_only_for_dynamics_modes():
    text = "[run]\nd = 2\n[gate]\nname = z\nmatrix = 1, 0 ; 0, -1\n"
    with pytest.raises(ConfigError, match="run.d"):
        cfg_from(text)
    cfg = cfg_from(text.replace("d = 2", "d = 2\nmode = check-decoupling"))
    assert cfg.check.dims == (2,)


def test_custom_matrix_and_comments():
    cfg = cfg_from("[run]\nmode = feasibility  # inline comment\n"
                   "[gate]\nname = mine\ntau = 1.0\n"
                   "matrix = 1, 0.5j, 0 ; -0.5j, 0, 0 ; 0, 0, -1\n")
    assert cfg.gate.name == "mine"
    assert np.isclose(cfg.gate.HG[0, 1], 0.5j)
    with pytest.raises(ConfigError, match="gate"):
        cfg_from("[gate]\nname = bad\nmatrix = 0, 1 ; 0, 0\n")


def test_dump_roundtrip():
    cfg = load_config(preset="fig2")
    again = build(read_text(dump(cfg)))
    assert np.allclose(again.gate.HG, cfg.gate.HG)
    assert again.bath == cfg.bath
    assert again.grid == cfg.grid
    assert again.n_values == cfg.n_values


def test_config_file_overlays_preset(tmp_path):
    p = tmp_path / "run.ini"
    p.write_text("[sweep]\nn_values = 2\n")
    cfg = load_config(p, preset="fig2")
    assert cfg.n_values == (2,)
    assert cfg.grid.n_steps == 10240
    with pytest.raises(ConfigError):
        load_config(tmp_path / "missing.ini")


def test_cli_requires_input(capsys):
    assert cli.main([]) == 2


def test_cli_check_decoupling(capsys):
    assert cli.main(["--preset", "fig2", "--mode", "check-decoupling", "--seed", "7"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("d=3: max deviation")
    worst = float(out[-1].split()[-1])
    assert worst <= 1e-8


def test_cli_sweep_outputs_and_reruns(tmp_path, capsys):
    ini = tmp_path / "small.ini"
    ini.write_text(SMALL.format(out=tmp_path / "a"))
    assert cli.main(["--config", str(ini), "--jobs", "2"]) == 0
    assert cli.main(["--config", str(ini), "--jobs", "1", "--out", str(tmp_path / "b")]) == 0
    a, b = tmp_path / "a", tmp_path / "b"
    names = {"fidelity.csv", "gate_fidelity.csv", "fig2.gp", "fig2.png", "manifest.txt"}
    assert {p.name for p in a.iterdir()} == names
    for name in names - {"manifest.txt"}:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name
    lines = (a / "fidelity.csv").read_text().splitlines()
    assert lines[0] == "t/tau,unprotected,n=1,n=2"
    assert len(lines) == 1282
    gate = (a / "gate_fidelity.csv").read_text().splitlines()
    assert gate[0] == "n,fidelity"
    assert [r.split(",")[0] for r in gate[1:]] == ["0", "1", "2"]
    assert "unprotected" in capsys.readouterr().out


def test_cli_run_mode_single(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text(SMALL.format(out=tmp_path) .replace("mode = sweep", "mode = run\nn = 2"))
    assert cli.main(["--config", str(ini)]) == 0
    assert (tmp_path / "fidelity.csv").read_text().splitlines()[0] == "t/tau,n=2"


def test_cli_reports_config_errors(tmp_path, capsys):
    ini = tmp_path / "bad.ini"
    ini.write_text("[gate]\nname = hadamard\n[grid]\nn_steps = 2000\n")
    assert cli.main(["--config", str(ini)]) == 1
    assert "grid.n_steps" in capsys.readouterr().err


def test_failed_run_removes_partial_output(tmp_path, monkeypatch):
    cfg = cfg_from(SMALL.format(out=tmp_path / "x"))

    def boom(*args, **kwargs):
        raise RuntimeError("renderer failed")

    monkeypatch.setattr(plotting, "plot_fidelity", boom)
    with pytest.raises(RuntimeError):
        cli.run(cfg, jobs=1)
    assert list((tmp_path / "x").iterdir()) == []


def test_export_schedule(tmp_path, capsys):
    assert cli.main(["--preset", "fig2", "--mode", "export-schedule",
                     "--out", str(tmp_path)]) == 0
    header, names, data = read_schedule_csv(tmp_path / "schedule.csv")
    assert names == schedule_columns()
    assert len(names) == 19
    assert data.shape == (201, 19)
    assert header["time_unit"] == "tau"
    assert header["eta"] <= 1e-3
    assert (tmp_path / "schedule.png").stat().st_size > 0


def test_feasibility_mode(capsys):
    assert cli.main(["--preset", "fig2", "--mode", "feasibility"]) == 0
    out = capsys.readouterr().out
    assert out.count("pass") == 3


def test_shipped_example_matches_preset():
    from pathlib import Path

    path = Path(__file__).resolve().parents[1] / "configs" / "fig2.ini"
    cfg, preset = load_config(path), load_config(preset="fig2")
    assert cfg.bath == preset.bath
    assert cfg.grid == preset.grid
    assert cfg.n_values == preset.n_values
    assert np.array_equal(cfg.gate.HG, preset.gate.HG)
