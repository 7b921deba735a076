import json
from pathlib import Path

import pytest

from empasim import ConfigError, UsageError
from empasim.cli import main
from empasim.config import materialize, parse_config

CONFIG_DIR = Path(__file__).resolve().parent.parent / "configs"


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


FIG1_BUS = """
[topology]
kind = shared_bus
t_bus = 1

[workload]
layers = 1,2,1
t_comp = 5

[output]
dataset = {dataset}
trace = {trace}
"""


def test_parse_config_round_trip(tmp_path):
    cfg = parse_config(_write(tmp_path, "a.ini", FIG1_BUS.format(dataset="d.csv", trace="t.jsonl")))
    assert cfg.topology.kind == "shared_bus"
    assert cfg.workload.layers == (1, 2, 1)
    assert cfg.output.dataset == "d.csv"
    workload, topology = materialize(cfg)
    assert len(workload.neurons) == 4
    assert topology.kind == "shared_bus"


def test_parse_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        parse_config(str(tmp_path / "missing.ini"))
    with pytest.raises(ConfigError):
        parse_config(_write(tmp_path, "b.ini", "[workload]\nlayers = 1,1\n"))
    with pytest.raises(ConfigError):
        parse_config(_write(tmp_path, "c.ini", "[topology]\nkind = warp\n"))
    with pytest.raises(ConfigError):
        parse_config(
            _write(tmp_path, "d.ini", "[topology]\nkind = direct\n[workload]\nlayers = 1\n")
        )
    with pytest.raises(ConfigError):
        parse_config(
            _write(
                tmp_path,
                "e.ini",
                "[topology]\nkind = direct\n[workload]\ntime_model = grid\n",
            )
        )
    with pytest.raises(ConfigError):
        parse_config(
            _write(
                tmp_path,
                "f.ini",
                "[topology]\nkind = shared_bus\n[sweep]\nparameter = voltage\nvalues = 1\n",
            )
        )
    with pytest.raises(ConfigError):
        parse_config(
            _write(
                tmp_path,
                "g.ini",
                "[topology]\nkind = shared_bus\n[sweep]\nparameter = width\nvalues =\n",
            )
        )


def test_materialize_sweep_overrides(tmp_path):
    cfg = parse_config(_write(tmp_path, "a.ini", FIG1_BUS.format(dataset="d.csv", trace="")))
    wide, _ = materialize(cfg, "width", 7)
    assert len(wide.neurons) == 9
    gridded, _ = materialize(cfg, "period", 10)
    assert gridded.grid_period == 10
    with pytest.raises(UsageError):
        materialize(cfg, "cores", 4)  # no total_work configured
    with pytest.raises(UsageError):
        materialize(cfg, "clusters", 2)  # not an empa topology


def test_cmd_run_writes_dataset_and_trace(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    config = _write(tmp_path, "fig1.ini", FIG1_BUS.format(dataset="out.csv", trace="trace.jsonl"))
    assert main(["run", "--config", config]) == 0
    rows = (tmp_path / "out.csv").read_text().splitlines()
    assert len(rows) == 2
    assert rows[1].startswith("-,13,")
    trace_lines = (tmp_path / "trace.jsonl").read_text().splitlines()
    assert json.loads(trace_lines[0])["kind"] == "msg_deliver"


def test_cmd_run_is_byte_deterministic(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    config = _write(tmp_path, "fig1.ini", FIG1_BUS.format(dataset="one.csv", trace="one.jsonl"))
    assert main(["run", "--config", config]) == 0
    first = ((tmp_path / "one.csv").read_bytes(), (tmp_path / "one.jsonl").read_bytes())
    assert main(["run", "--config", config]) == 0
    second = ((tmp_path / "one.csv").read_bytes(), (tmp_path / "one.jsonl").read_bytes())
    assert first == second


def test_cmd_run_exit_codes(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "nope.ini")]) == 2
    assert "error[config]:" in capsys.readouterr().err

    bad = _write(tmp_path, "bad.ini", "[topology]\nkind = nothing\n")
    assert main(["run", "--config", bad]) == 2
    assert "error[config]:" in capsys.readouterr().err

    cramped = _write(
        tmp_path,
        "cramped.ini",
        "[topology]\nkind = shared_bus\nn_nodes = 2\n[workload]\nlayers = 1,2,1\n"
        f"[output]\ndataset = {tmp_path / 'x.csv'}\n",
    )
    assert main(["run", "--config", cramped]) == 3
    err = capsys.readouterr().err
    assert "error[runtime]:" in err and "nodes" in err


def test_cmd_sweep_dataset(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    config = _write(
        tmp_path,
        "sweep.ini",
        "[topology]\nkind = shared_bus\nt_bus = 1\n"
        "[workload]\nlayers = 1,2,1\nt_comp = 5\n"
        "[sweep]\nparameter = width\nvalues = 2,3,4\n"
        "[output]\ndataset = sweep.csv\n",
    )
    assert main(["sweep", "--config", config]) == 0
    rows = (tmp_path / "sweep.csv").read_text().splitlines()
    assert len(rows) == 4
    assert [row.split(",")[1] for row in rows[1:]] == ["13", "14", "15"]
    assert main(["sweep", "--config", config, "--jobs", "3", "--out", "sweep2.csv"]) == 0
    assert (tmp_path / "sweep2.csv").read_text().splitlines()[1:] == rows[1:]


def test_cmd_sweep_requires_sweep_section(tmp_path, capsys):
    config = _write(tmp_path, "nosweep.ini", FIG1_BUS.format(dataset="d.csv", trace=""))
    assert main(["sweep", "--config", config]) == 2
    assert "error[config]:" in capsys.readouterr().err


def test_shipped_configs_parse_and_run(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    for name in ("fig1_bus.ini", "fig1_direct.ini", "empa_chain.ini"):
        assert main(["run", "--config", str(CONFIG_DIR / name)]) == 0
    for name in ("width_sweep.ini", "cores_sweep.ini", "grid_periods.ini"):
        assert main(["sweep", "--config", str(CONFIG_DIR / name)]) == 0
    width_totals = [
        int(line.split(",")[1])
        for line in (tmp_path / "width_sweep.csv").read_text().splitlines()[1:]
    ]
    assert width_totals == [13, 15, 19, 27, 43, 75]
    grid_totals = [
        int(line.split(",")[1])
        for line in (tmp_path / "grid_periods.csv").read_text().splitlines()[1:]
    ]
    assert grid_totals == sorted(grid_totals)


def test_cmd_model_curves(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(["model", "--s", "0", "--c", "0", "--n-values", "1,2,4,8", "--out", "ideal.csv"]) == 0
    rows = (tmp_path / "ideal.csv").read_text().splitlines()
    assert rows[0] == "profile,n,speedup_first,speedup_second,efficiency,payload_performance"
    speedups = [float(row.split(",")[3]) for row in rows[1:]]
    assert speedups == [1.0, 2.0, 4.0, 8.0]

    assert main(["model", "--s", "0", "--c", "0.01", "--n-values", ",".join(map(str, range(1, 41))), "--out", "peak.csv"]) == 0
    peaked = [float(row.split(",")[3]) for row in (tmp_path / "peak.csv").read_text().splitlines()[1:]]
    assert peaked.index(max(peaked)) + 1 == 10


def test_cmd_model_presets_plateau_order(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main(["model", "--preset", "all", "--n-max", "1000000000", "--points", "28", "--out", "presets.csv"]) == 0
    plateaus = {}
    for line in (tmp_path / "presets.csv").read_text().splitlines()[1:]:
        name, _, _, _, _, payload = line.split(",")
        plateaus[name] = max(plateaus.get(name, 0.0), float(payload))
    assert plateaus["hpl"] > plateaus["hpcg"] > plateaus["ai"] > plateaus["brain"]


def test_cmd_model_surface(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert main([
        "model", "--surface", "--s-values", "1e-7,1e-5,1e-2",
        "--n-values", "10,1000,100000", "--out", "surface.csv",
    ]) == 0
    rows = (tmp_path / "surface.csv").read_text().splitlines()
    assert rows[0] == "s,n,efficiency"
    assert len(rows) == 10


def test_cmd_extrapolate_output(capsys):
    assert main([
        "extrapolate", "--perf-a", "148.6e15", "--width-a", "64",
        "--perf-b", "445e15", "--width-b", "16",
    ]) == 0
    out = capsys.readouterr().out
    values = dict(line.split() for line in out.splitlines())
    assert float(values["fp0_performance"]) == pytest.approx(1.32785e18, rel=0.01)
    assert 0.0 < float(values["housekeeping_share"]) < 1.0


def test_cmd_extrapolate_error_paths(capsys):
    assert main(["extrapolate", "--perf-a", "100", "--width-a", "64", "--perf-b", "100", "--width-b", "16"]) == 2
    assert "error[usage]:" in capsys.readouterr().err
    assert main(["extrapolate", "--perf-a", "100", "--width-a", "64", "--perf-b", "400", "--width-b", "16"]) == 2
    assert "error[usage]:" in capsys.readouterr().err
