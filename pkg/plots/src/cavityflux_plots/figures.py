"""Figure construction from parsed sweep rows and heatmap grids.

Figures are built as plain matplotlib objects so tests can assert on the
object model (series counts, reference lines) without rasterizing.  Rendering
is a pure function of the CSV content and the PlotSpec.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg", force=False)

import matplotlib.pyplot as plt  # noqa: E402

from .model import (Heatmap, PlotSpec, SchemaError, parse_point_source,
                    read_heatmap, read_sweep, select)

METHOD_COLORS = {"pwb": "black", "rt": "tab:blue", "dea": "tab:red"}
PORT_STYLES = ["-", "--", "-.", ":"]
SCENE_STYLES = [":", "-", "--", "-."]  # dotted first: wide-opening variant
REFERENCE_GID = "pwb-reference"
SOURCE_MARKER_GID = "source-marker"


def _ordered_unique(values):
    seen = {}
    for v in values:
        seen.setdefault(v, None)
    return list(seen)


def _series_key(rows, fields):
    keys = _ordered_unique(tuple(r[f] for f in fields) for r in rows)
    return sorted(keys)


def build_figure(spec: PlotSpec):
    """Matplotlib Figure for a PlotSpec; pure function of the input files."""
    if spec.kind == "heatmap":
        return _heatmap_figure(read_heatmap(spec.csv_paths[0]))
    rows = select(read_sweep(spec.csv_paths), spec)
    if not rows:
        raise SchemaError("no rows left after scene/method/port selection")
    if spec.kind == "alpha-sweep":
        return _alpha_sweep_figure(rows)
    return _source_sweep_figure(rows, spec.reference)


def _alpha_sweep_figure(rows):
    """Two panels: log power vs linear alpha, and linear power vs log alpha."""
    fig, (ax_log, ax_lin) = plt.subplots(1, 2, figsize=(10, 4))
    ports = _ordered_unique(r["port"] for r in rows)
    for method, port in _series_key(rows, ("method", "port")):
        series = sorted(((r["alpha"], r["power"]) for r in rows
                         if r["method"] == method and r["port"] == port))
        xs = [a for a, _ in series]
        ys = [p for _, p in series]
        style = dict(color=METHOD_COLORS.get(method, "tab:gray"),
                     linestyle=PORT_STYLES[ports.index(port) % len(PORT_STYLES)],
                     label=f"{method} {port}", gid=f"series:{method}:{port}")
        ax_log.plot(xs, ys, **style)
        pos = [(a, p) for a, p in series if a > 0]  # log axis drops alpha = 0
        ax_lin.plot([a for a, _ in pos], [p for _, p in pos], **style)
    ax_log.set_yscale("log")
    ax_log.set_xlabel(r"absorption factor $\alpha$")
    ax_log.set_ylabel("port power (log)")
    ax_lin.set_xscale("log")
    ax_lin.set_xlabel(r"absorption factor $\alpha$ (log)")
    ax_lin.set_ylabel("port power")
    ax_log.legend(fontsize=8)
    fig.tight_layout()
    return fig


def _source_sweep_figure(rows, reference):
    """Per-source powers, one series per (scene, method, port)."""
    fig, ax = plt.subplots(figsize=(7, 4))
    sources = _ordered_unique(r["source"] for r in rows)
    scenes = _ordered_unique(r["scene"] for r in rows)
    x_of = {s: i + 1 for i, s in enumerate(sources)}
    for scene, method, port in _series_key(rows, ("scene", "method", "port")):
        pts = sorted((x_of[r["source"]], r["power"]) for r in rows
                     if r["scene"] == scene and r["method"] == method
                     and r["port"] == port)
        ax.plot([x for x, _ in pts], [p for _, p in pts],
                color=METHOD_COLORS.get(method, "tab:gray"),
                linestyle=SCENE_STYLES[scenes.index(scene) % len(SCENE_STYLES)],
                marker="o", markersize=3,
                label=f"{scene} {method} {port}",
                gid=f"series:{scene}:{method}:{port}")
    if reference is not None:
        ax.axhline(reference, color="0.4", linewidth=1.0,
                   label=f"balance reference {reference:g}", gid=REFERENCE_GID)
    ax.set_xticks(list(x_of.values()))
    ax.set_xlabel("source position index")
    ax.set_ylabel("port power")
    ax.legend(fontsize=7)
    fig.tight_layout()
    return fig


def _heatmap_figure(hm: Heatmap):
    fig, ax = plt.subplots(figsize=(6, 5))
    im = ax.imshow(hm.values, origin="lower", extent=hm.extent,
                   cmap="viridis", aspect="equal")
    fig.colorbar(im, ax=ax, label="energy density")
    source = hm.meta.get("source")
    if source:
        pt = parse_point_source(source)
        if pt is not None:
            ax.plot([pt[0]], [pt[1]], "ro", markersize=5, gid=SOURCE_MARKER_GID)
    title = ", ".join(f"{k}={hm.meta[k]}" for k in ("scene", "method", "alpha")
                      if k in hm.meta)
    if title:
        ax.set_title(title)
    return fig


def render(spec: PlotSpec) -> str:
    """Build and write the figure; returns the output path."""
    fig = build_figure(spec)
    fig.savefig(spec.out_path, dpi=150)
    plt.close(fig)
    return spec.out_path
