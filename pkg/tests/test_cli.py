import numpy as np
import pytest

from wallflock import ConfigError, read_diagnostics_csv
from wallflock.cli import build_parser, main, parse_sweep

FREE_ALIGNING = """
kernel: {family: constant, H: 1.0}
ic: {n_agents: 4, x_low: 2.0, x_high: 4.0, v_low: 0.1, v_high: 0.9, seed: 1}
integrator: {t_end: 10.0, sample_every: 0.1}
"""

NO_WALL_CONTROL = """
potential: {theta: 0.0}
ic: {n_agents: 4, x_low: 0.5, x_high: 3.0, v_low: -1.0, v_high: -0.5, seed: 42}
integrator: {t_end: 10.0, sample_every: 0.1}
"""

STIFF = """
kernel: {family: constant, H: 1.0}
ic: {n_agents: 2, x_low: 5.0, x_high: 6.0, v_low: -2.0, v_high: 2.0, seed: 3}
integrator: {t_end: 1.0, sample_every: 1.0, dt_init: 0.2, dt_min: 0.2, dt_max: 0.2,
             abs_tol: 1.0e-13, rel_tol: 1.0e-13}
"""

SWEEP = """
base:
  kernel: {family: constant, H: 1.0}
  ic: {n_agents: 4, x_low: 2.0, x_high: 4.0, v_low: 0.1, v_high: 0.9, seed: 1}
  integrator: {t_end: 10.0, sample_every: 0.1}
sweep:
  axes:
    - {key: kernel.H, values: [1.2, 0.8]}
  seeds: [2, 1]
  parallelism: %d
"""


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_parser_requires_subcommand():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])
    args = build_parser().parse_args(["simulate", "--seed", "7", "--quiet"])
    assert args.command == "simulate"
    assert args.seed == 7
    assert args.quiet


def test_simulate_writes_artifacts(tmp_path, capsys):
    cfg = write(tmp_path, "run.yaml", FREE_ALIGNING)
    out = tmp_path / "run1"
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    assert (out / "config.yaml").read_text() == FREE_ALIGNING
    table = read_diagnostics_csv(out / "diagnostics.csv")
    assert table.shape == (101, 16)
    final = (out / "final_state.csv").read_text().splitlines()
    assert final[0] == "i,x,v"
    assert len(final) == 5
    assert "min_wall_distance" in capsys.readouterr().out


def test_simulate_is_byte_deterministic(tmp_path):
    cfg = write(tmp_path, "run.yaml", FREE_ALIGNING)
    outs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(["simulate", "--config", str(cfg), "--out", str(out), "--quiet"]) == 0
        outs.append(out)
    for fname in ("config.yaml", "diagnostics.csv", "final_state.csv"):
        assert (outs[0] / fname).read_bytes() == (outs[1] / fname).read_bytes()


def test_seed_override_changes_the_run(tmp_path):
    cfg = write(tmp_path, "run.yaml", FREE_ALIGNING)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--config", str(cfg), "--out", str(a), "--quiet"]) == 0
    assert main(["simulate", "--config", str(cfg), "--out", str(b), "--seed", "99", "--quiet"]) == 0
    ta = read_diagnostics_csv(a / "diagnostics.csv")
    tb = read_diagnostics_csv(b / "diagnostics.csv")
    assert not np.array_equal(ta, tb)
    with pytest.raises(SystemExit):
        main(["simulate", "--seed", "not-a-number"])
    assert main(["simulate", "--config", str(cfg), "--out", str(a), "--seed", "-1"]) == 2


def test_verify_pass_fail_and_report(tmp_path, capsys):
    cfg = write(tmp_path, "ok.yaml", FREE_ALIGNING)
    out = tmp_path / "ok"
    assert main(["verify", "--config", str(cfg), "--out", str(out)]) == 0
    text = (out / "report.json").read_text()
    assert '"passed": true' in text
    stdout = capsys.readouterr().out
    assert "PASS velocity_alignment" in stdout
    assert "report: PASS" in stdout

    bad = write(tmp_path, "control.yaml", NO_WALL_CONTROL)
    out2 = tmp_path / "control"
    assert main(["verify", "--config", str(bad), "--out", str(out2), "--quiet"]) == 1
    report = (out2 / "report.json").read_text()
    assert '"name": "no_wall_collision"' in report


def test_verify_integration_failure_exit_code(tmp_path):
    cfg = write(tmp_path, "stiff.yaml", STIFF)
    out = tmp_path / "stiff"
    assert main(["verify", "--config", str(cfg), "--out", str(out), "--quiet"]) == 3
    assert '"passed": false' in (out / "report.json").read_text()


def test_simulate_integration_failure_exit_code(tmp_path, capsys):
    cfg = write(tmp_path, "stiff.yaml", STIFF)
    out = tmp_path / "stiff"
    assert main(["simulate", "--config", str(cfg), "--out", str(out), "--quiet"]) == 3
    assert not (out / "diagnostics.csv").exists()
    assert "integration failed" in capsys.readouterr().err


def test_config_errors_exit_2(tmp_path, capsys):
    bad = write(tmp_path, "bad.yaml", "kernel: {gamma: 1.0}")
    assert main(["simulate", "--config", str(bad)]) == 2
    assert "config error" in capsys.readouterr().err
    assert main(["simulate", "--config", str(tmp_path / "missing.yaml")]) == 2
    assert main(["sweep"]) == 2  # sweep requires --config


def test_parse_sweep_validation():
    base, axes, seeds, par = parse_sweep(SWEEP % 2)
    assert axes == [("kernel.H", [1.2, 0.8])]
    assert seeds == [2, 1]
    assert par == 2
    with pytest.raises(ConfigError, match="top-level 'sweep'"):
        parse_sweep("base: {}")
    with pytest.raises(ConfigError, match="exactly the keys"):
        parse_sweep("sweep:\n  axes:\n    - {key: kernel.H}")
    with pytest.raises(ConfigError, match="nonempty"):
        parse_sweep("sweep:\n  axes:\n    - {key: kernel.H, values: []}")
    with pytest.raises(ConfigError, match="not a config key"):
        parse_sweep("sweep:\n  axes:\n    - {key: kernel.bogus, values: [1]}")
    with pytest.raises(ConfigError, match="seeds"):
        parse_sweep("sweep:\n  seeds: [1, true]")
    with pytest.raises(ConfigError, match="parallelism"):
        parse_sweep("sweep:\n  parallelism: 0")
    with pytest.raises(ConfigError, match="exceeds"):
        parse_sweep("sweep:\n  seeds: [%s]" % ", ".join(str(i) for i in range(10_001)))


def test_sweep_runs_sorted_and_parallelism_independent(tmp_path):
    rows = {}
    for par, name in ((1, "p1"), (4, "p4")):
        cfg = write(tmp_path, f"sweep_{name}.yaml", SWEEP % par)
        out = tmp_path / name
        assert main(["sweep", "--config", str(cfg), "--out", str(out), "--quiet"]) == 0
        rows[name] = (out / "sweep.csv").read_text()
    lines = rows["p1"].splitlines()
    assert lines[0] == "kernel.H,seed,variant,final_A,delta,min_wall_distance,passed,status"
    assert len(lines) == 5
    # rows ordered by axis value then seed, regardless of list or completion order
    assert [l.split(",")[:2] for l in lines[1:]] == [
        ["0.80000000000000004", "1"],
        ["0.80000000000000004", "2"],
        ["1.2", "1"],
        ["1.2", "2"],
    ]
    assert rows["p1"].split("\n") == rows["p4"].split("\n")
    # byte-identical across parallelism
    assert (tmp_path / "p1" / "sweep.csv").read_bytes() == (tmp_path / "p4" / "sweep.csv").read_bytes()


def test_sweep_failing_row_exits_1(tmp_path):
    text = """
base:
  kernel: {family: constant, H: 1.0}
  ic: {n_agents: 4, x_low: 2.0, x_high: 4.0, v_low: 0.1, v_high: 0.9, seed: 1}
  integrator: {t_end: 10.0, sample_every: 0.1}
sweep:
  axes:
    - {key: kernel.H, values: [0.05]}
"""
    cfg = write(tmp_path, "sweep.yaml", text)
    out = tmp_path / "fail"
    assert main(["sweep", "--config", str(cfg), "--out", str(out), "--quiet"]) == 1
    body = (out / "sweep.csv").read_text()
    assert "False" in body


def test_plot_data_outputs(tmp_path, capsys):
    cfg = write(tmp_path, "run.yaml", FREE_ALIGNING)
    out = tmp_path / "plots"
    assert main(["plot-data", "--config", str(cfg), "--out", str(out), "--quiet"]) == 0
    lines = (out / "plot.dat").read_text().splitlines()
    assert lines[0] == "# t A E K p D F_max"
    assert len(lines) == 102
    pos = (out / "plot_positions.dat").read_text().splitlines()
    assert pos[0] == "# t x0 x1 x2 x3"
    assert len(pos) == 102
    assert capsys.readouterr().out == ""
