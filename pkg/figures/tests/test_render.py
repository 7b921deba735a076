from pathlib import Path

import pytest

from empasim_figures import FigureSpec, SchemaError, load_csv, load_trace, render
from empasim_figures.cli import main

EXAMPLES = Path(__file__).resolve().parent.parent / "examples"


def test_load_csv_validates_columns(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("a,b\n1,2\n")
    with pytest.raises(SchemaError, match="'efficiency'"):
        load_csv(path, ("a", "efficiency"))
    rows = load_csv(path, ("a", "b"))
    assert rows == [{"a": "1", "b": "2"}]


def test_load_trace_validates_records(tmp_path):
    path = tmp_path / "bad.jsonl"
    path.write_text('{"time": 0, "kind": "compute_end"}\n')
    with pytest.raises(SchemaError, match="'subject'"):
        load_trace(path)
    path.write_text("not json\n")
    with pytest.raises(SchemaError):
        load_trace(path)


def test_unknown_kind_rejected(tmp_path):
    with pytest.raises(SchemaError):
        FigureSpec("pie", "x.csv", str(tmp_path / "x.png"))


def test_surface_renders(tmp_path):
    out = render(FigureSpec("surface", str(EXAMPLES / "efficiency_surface.csv"), str(tmp_path / "s.png")))
    assert Path(out).stat().st_size > 0


def test_roofline_renders(tmp_path):
    out = render(FigureSpec("roofline", str(EXAMPLES / "model_presets.csv"), str(tmp_path / "r.png")))
    assert Path(out).stat().st_size > 0


def test_limit_renders(tmp_path):
    out = render(FigureSpec("limit", str(EXAMPLES / "model_presets.csv"), str(tmp_path / "l.png")))
    assert Path(out).stat().st_size > 0


def test_gantt_renders(tmp_path):
    out = render(FigureSpec("gantt", str(EXAMPLES / "fig1_bus_trace.jsonl"), str(tmp_path / "g.png")))
    assert Path(out).stat().st_size > 0


def test_rendering_is_deterministic(tmp_path):
    a = render(FigureSpec("roofline", str(EXAMPLES / "model_presets.csv"), str(tmp_path / "a.png")))
    b = render(FigureSpec("roofline", str(EXAMPLES / "model_presets.csv"), str(tmp_path / "b.png")))
    assert Path(a).read_bytes() == Path(b).read_bytes()


def test_cli_render_and_schema_exit_codes(tmp_path, capsys):
    out = tmp_path / "cli.png"
    assert main(["render", "gantt", str(EXAMPLES / "fig1_bus_trace.jsonl"), str(out)]) == 0
    assert out.stat().st_size > 0

    wrong = tmp_path / "wrong.csv"
    wrong.write_text("x,y\n1,2\n")
    assert main(["render", "roofline", str(wrong), str(tmp_path / "no.png")]) == 2
    err = capsys.readouterr().err
    assert "error[schema]:" in err and "profile" in err
