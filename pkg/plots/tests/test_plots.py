"""Tests for the figure package, asserted on the matplotlib object model."""

import csv
import json

import matplotlib

matplotlib.use("Agg")

import numpy as np
import pytest

from cavityflux_plots import (PlotSpec, SchemaError, build_figure, read_sweep,
                              render)
from cavityflux_plots.cli import main
from cavityflux_plots.figures import REFERENCE_GID, SOURCE_MARKER_GID
from cavityflux_plots.model import (SWEEP_COLUMNS, parse_point_source,
                                    read_heatmap, select)

def write_sweep(path, scenes=("fig1a",), methods=("pwb", "rt", "dea"),
                ports=("P1", "P2"), alphas=(0.0, 0.01, 0.1, 1.0),
                sources=("port:P1",)):
    with open(path, "w", newline="") as fh:
        fh.write("# generated 2026-01-01T00:00:00\n")
        writer = csv.writer(fh)
        writer.writerow(SWEEP_COLUMNS)
        for scene in scenes:
            for method in methods:
                for alpha in alphas:
                    for source in sources:
                        for i, port in enumerate(ports):
                            power = 0.5 / (1 + 10 * alpha) / (i + 1)
                            writer.writerow([scene, method, alpha, source,
                                             port, power, 0.0, 1.5, "res"])
    return str(path)


def series_lines(ax):
    return [ln for ln in ax.lines if (ln.get_gid() or "").startswith("series:")]


def test_read_sweep_parses_rows(tmp_path):
    path = write_sweep(tmp_path / "s.csv")
    rows = read_sweep([path])
    assert len(rows) == 3 * 4 * 2
    assert set(rows[0]) == set(SWEEP_COLUMNS)
    assert isinstance(rows[0]["alpha"], float)
    assert isinstance(rows[0]["power"], float)


def test_read_sweep_rejects_wrong_header(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("scene,method,alpha,port,power\nfig2,rt,0.0,P1,0.5\n")
    with pytest.raises(SchemaError, match="expected columns"):
        read_sweep([str(bad)])


def test_select_filters(tmp_path):
    rows = read_sweep([write_sweep(tmp_path / "s.csv")])
    spec = PlotSpec(csv_paths=["x"], kind="alpha-sweep", out_path="o.png",
                    methods=["rt"], ports=["P1"])
    out = select(rows, spec)
    assert out and all(r["method"] == "rt" and r["port"] == "P1" for r in out)


def test_plotspec_rejects_bad_kind():
    with pytest.raises(ValueError, match="kind"):
        PlotSpec(csv_paths=["x"], kind="pie-chart", out_path="o.png")
    with pytest.raises(ValueError, match="csv_paths"):
        PlotSpec(csv_paths=[], kind="heatmap", out_path="o.png")


def test_alpha_sweep_has_two_panels_six_series_each(tmp_path):
    path = write_sweep(tmp_path / "s.csv")
    fig = build_figure(PlotSpec(csv_paths=[path], kind="alpha-sweep",
                                out_path=str(tmp_path / "o.png")))
    axes = fig.get_axes()
    assert len(axes) == 2
    for ax in axes:
        assert len(series_lines(ax)) == 6  # 3 methods x 2 ports
    left, right = axes
    assert left.get_yscale() == "log" and left.get_xscale() == "linear"
    assert right.get_xscale() == "log" and right.get_yscale() == "linear"
    # the log-alpha panel must not contain the alpha = 0 samples
    for ln in series_lines(right):
        assert np.all(np.asarray(ln.get_xdata()) > 0)


def test_source_sweep_reference_line_and_series(tmp_path):
    sources = tuple(f"point:0.{i+1},0.5" for i in range(7))
    path = write_sweep(tmp_path / "s.csv", scenes=("fig2", "fig3"),
                       methods=("rt", "dea"), ports=("P1",), alphas=(0.0,),
                       sources=sources)
    fig = build_figure(PlotSpec(csv_paths=[path], kind="source-sweep",
                                out_path=str(tmp_path / "o.png")))
    (ax,) = fig.get_axes()
    assert len(series_lines(ax)) == 4  # 2 scenes x 2 methods x 1 port
    refs = [ln for ln in ax.lines if ln.get_gid() == REFERENCE_GID]
    assert len(refs) == 1
    assert refs[0].get_ydata()[0] == pytest.approx(0.44)
    # the two scenes get distinct line styles
    styles = {ln.get_linestyle() for ln in series_lines(ax)}
    assert len(styles) == 2


def test_source_sweep_reference_suppressed(tmp_path):
    path = write_sweep(tmp_path / "s.csv", alphas=(0.0,))
    fig = build_figure(PlotSpec(csv_paths=[path], kind="source-sweep",
                                out_path="o.png", reference=None))
    (ax,) = fig.get_axes()
    assert not [ln for ln in ax.lines if ln.get_gid() == REFERENCE_GID]


def write_heatmap(tmp_path, source="point:0.3,0.7"):
    values = np.arange(12, dtype=float).reshape(3, 4)
    csv_path = tmp_path / "hm.csv"
    np.savetxt(csv_path, values, delimiter=",")
    meta = {"origin": [0.0, 0.0], "cell_size": 0.25, "scene": "fig2",
            "method": "dea", "alpha": 0.1}
    if source:
        meta["source"] = source
    (tmp_path / "hm.meta").write_text(json.dumps(meta))
    return str(csv_path), values


def test_read_heatmap(tmp_path):
    csv_path, values = write_heatmap(tmp_path)
    hm = read_heatmap(csv_path)
    assert np.array_equal(hm.values, values)
    assert hm.extent == (0.0, 1.0, 0.0, 0.75)


def test_read_heatmap_missing_sidecar(tmp_path):
    csv_path, _ = write_heatmap(tmp_path)
    (tmp_path / "hm.meta").unlink()
    with pytest.raises(SchemaError, match="sidecar"):
        read_heatmap(csv_path)


def test_heatmap_figure_marks_point_source(tmp_path):
    csv_path, values = write_heatmap(tmp_path)
    fig = build_figure(PlotSpec(csv_paths=[csv_path], kind="heatmap",
                                out_path="o.png"))
    (ax,) = [a for a in fig.get_axes() if a.images]
    assert np.array_equal(ax.images[0].get_array().data, values)
    markers = [ln for ln in ax.lines if ln.get_gid() == SOURCE_MARKER_GID]
    assert len(markers) == 1
    assert markers[0].get_xydata()[0] == pytest.approx([0.3, 0.7])


def test_heatmap_figure_without_source_has_no_marker(tmp_path):
    csv_path, _ = write_heatmap(tmp_path, source=None)
    fig = build_figure(PlotSpec(csv_paths=[csv_path], kind="heatmap",
                                out_path="o.png"))
    for ax in fig.get_axes():
        assert not [ln for ln in ax.lines if ln.get_gid() == SOURCE_MARKER_GID]


def test_parse_point_source():
    assert parse_point_source("point:0.5,0.25") == (0.5, 0.25)
    assert parse_point_source("port:P1") is None


def test_render_writes_file(tmp_path):
    path = write_sweep(tmp_path / "s.csv")
    out = tmp_path / "fig.png"
    render(PlotSpec(csv_paths=[path], kind="alpha-sweep", out_path=str(out)))
    assert out.stat().st_size > 0


def test_cli_round_trip(tmp_path):
    path = write_sweep(tmp_path / "s.csv")
    out = tmp_path / "cli.png"
    assert main(["--csv", path, "--kind", "alpha-sweep",
                 "--out", str(out)]) == 0
    assert out.exists()


def test_cli_schema_error_exit_code(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    assert main(["--csv", str(bad), "--kind", "alpha-sweep",
                 "--out", str(tmp_path / "x.png")]) == 1


def test_empty_selection_is_an_error(tmp_path):
    path = write_sweep(tmp_path / "s.csv")
    with pytest.raises(SchemaError, match="no rows"):
        build_figure(PlotSpec(csv_paths=[path], kind="alpha-sweep",
                              out_path="o.png", methods=["bem"]))
