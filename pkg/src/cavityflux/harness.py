"""Sweep driver: runs PWB / RT / DEA over alpha and source grids, writes CSV.

The CSV schema is the stable interface consumed by the plotting component:
header `scene,method,alpha,source,port,power,defect,runtime_ms,resolution`,
rows sorted by (scene, method, alpha, source, port).  A leading `#` timestamp
line and the runtime_ms column are the only run-dependent content.
"""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import dea, pwb, raytrace
from .geometry import Scene, build_scene, discretize, load_scene, pwb_dimensions
from .presets import POINT_SOURCES, PRESETS, build_preset, preset_config
from .raytrace import RtConfig, Source

CSV_HEADER = ["scene", "method", "alpha", "source", "port", "power",
              "defect", "runtime_ms", "resolution"]

# Covers both presentation axes: near-zero and log-spaced up to full loss.
DEFAULT_ALPHAS = [0.0, 1e-3, 1e-2, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9, 1.0]

TABLE1_SOURCES = [Source.point_isotropic(x, y) for x, y in POINT_SOURCES]


def default_elem_len(scene: Scene) -> float:
    """Element target length: 0.02, refined when openings are narrower."""
    if not scene.openings:
        return 0.02
    wmin = min(op.width for op in scene.openings)
    return min(0.02, wmin / 3.0)


@dataclass
class SweepSpec:
    scene: str  # preset name or path to a scene JSON file
    methods: Sequence[str] = ("pwb", "rt", "dea")
    alpha_values: Sequence[float] = tuple(DEFAULT_ALPHAS)
    sources: Sequence[Source] = (Source.port_normal("P1"),)
    rt: RtConfig = field(default_factory=RtConfig)
    n_dir: int = 64
    elem_len: Optional[float] = None  # None: per-scene default
    dea_quadrature: tuple = (4, 4)
    out_dir: str = "."
    heatmaps: bool = False
    heatmap_resolution: float = 50.0

    def __post_init__(self):
        if not self.methods or not len(self.alpha_values):
            raise ValueError("methods and alpha_values must be non-empty")
        for m in self.methods:
            if m not in ("pwb", "rt", "dea"):
                raise ValueError(f"unknown method {m!r}")
        for a in self.alpha_values:
            if not 0.0 <= a <= 1.0:
                raise ValueError(f"alpha {a} outside [0, 1]")


def resolve_scene(name: str, alpha: float = 0.0) -> Scene:
    if name in PRESETS:
        return build_preset(name, alpha=alpha)
    return load_scene(name).with_alpha(alpha)


def _exterior_ports(scene: Scene):
    return [op.id for op in scene.openings if op.kind == "port"]


def _pwb_rows(scene_name: str, scene: Scene, alphas, sources):
    rows = []
    for a in alphas:
        t0 = time.perf_counter()
        powers = pwb.report_for_scene(scene.with_alpha(a))
        ms = (time.perf_counter() - t0) * 1e3
        ext = _exterior_ports(scene)
        # Explicit closure check: exterior ports + wall absorption = injection
        # (aperture flow is internal and excluded).
        wall = math.fsum(v for k, v in powers.items() if k.startswith("wall:"))
        ports = math.fsum(powers[p] for p in ext)
        defect = abs(1.0 - wall - ports)
        for src in sources:  # PWB is source-position independent
            for pid in ext:
                rows.append((scene_name, "pwb", a, src.label(), pid,
                             powers[pid], defect, ms, "closed-form"))
    return rows


def _rt_rows(scene_name: str, scene: Scene, alphas, sources, rt: RtConfig,
             out_dir: Optional[Path], heatmaps: bool):
    rows = []
    ext = _exterior_ports(scene)
    for a in alphas:
        sc = scene.with_alpha(a)
        for src in sources:
            t0 = time.perf_counter()
            report, grid = raytrace.simulate(sc, src, rt)
            ms = (time.perf_counter() - t0) * 1e3
            for pid in ext:
                rows.append((scene_name, "rt", a, src.label(), pid,
                             report.p_port[pid], report.defect, ms,
                             f"rays={rt.n_rays}"))
            if heatmaps and grid is not None and out_dir is not None:
                tag = f"rt_{scene_name}_a{a:g}_{_slug(src.label())}"
                grid.save_csv(out_dir / f"heatmap_{tag}.csv",
                              out_dir / f"heatmap_{tag}.meta",
                              {"scene": scene_name, "method": "rt",
                               "alpha": a, "source": src.label()})
    return rows


def _slug(s: str) -> str:
    return s.replace(":", "-").replace(",", "_").replace(".", "p")


def _dea_rows(scene_name: str, scene: Scene, alphas, sources, n_dir, elem_len,
              quadrature, out_dir: Optional[Path], heatmaps: bool,
              heatmap_resolution: float, solver_tol: float = 1e-10):
    rows = []
    ext = _exterior_ports(scene)
    scene0 = scene.with_alpha(0.0)
    t_asm = time.perf_counter()
    disc = discretize(scene0, elem_len)
    basis = dea.PhaseSpaceBasis(disc, n_dir)
    op = dea.assemble(scene0, basis, quadrature)
    asm_ms = (time.perf_counter() - t_asm) * 1e3
    reflect = basis.reflect_cells()
    rho0_raw = np.stack([dea.source_vector(scene0, basis, src)
                         for src in sources], axis=1)
    res_tag = f"elem={elem_len:g},ndir={n_dir}"
    for a in alphas:
        t0 = time.perf_counter()
        L = op.scale(a)
        rho0 = rho0_raw.copy()
        rho0[reflect] *= (1.0 - a)
        if not np.any(rho0 > 0):
            rho = np.zeros_like(rho0)  # fully absorbed before first arrival
        else:
            rho = dea.solve(L, rho0, tol=solver_tol)
        ms = asm_ms + (time.perf_counter() - t0) * 1e3
        asm_ms = 0.0  # charge assembly to the first alpha only
        for si, src in enumerate(sources):
            for pid in ext:
                rows.append((scene_name, "dea", a, src.label(), pid,
                             dea.port_flux(basis, rho[:, si], pid),
                             0.0, ms, res_tag))
            if heatmaps and out_dir is not None:
                grid = dea.spatial_map(scene.with_alpha(a), basis, rho[:, si],
                                       heatmap_resolution, source=src)
                tag = f"dea_{scene_name}_a{a:g}_{_slug(src.label())}"
                grid.save_csv(out_dir / f"heatmap_{tag}.csv",
                              out_dir / f"heatmap_{tag}.meta",
                              {"scene": scene_name, "method": "dea",
                               "alpha": a, "source": src.label()})
        if heatmaps and out_dir is not None:
            for pid in ext:
                mu = dea.adjoint(L, basis.indicator(pid), tol=solver_tol)
                grid = dea.spatial_map(scene.with_alpha(a), basis, mu,
                                       heatmap_resolution)
                tag = f"adjoint_{scene_name}_a{a:g}_{pid}"
                grid.save_csv(out_dir / f"heatmap_{tag}.csv",
                              out_dir / f"heatmap_{tag}.meta",
                              {"scene": scene_name, "method": "dea-adjoint",
                               "alpha": a, "port": pid})
    return rows


def run_sweep(spec: SweepSpec) -> Path:
    """Execute the sweep and write <out_dir>/sweep.csv; returns its path."""
    out_dir = Path(spec.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    scene = resolve_scene(spec.scene)
    elem_len = spec.elem_len if spec.elem_len is not None else default_elem_len(scene)

    rows = []
    if "pwb" in spec.methods:
        rows += _pwb_rows(spec.scene, scene, spec.alpha_values, spec.sources)
    if "rt" in spec.methods:
        rows += _rt_rows(spec.scene, scene, spec.alpha_values, spec.sources,
                         spec.rt, out_dir, spec.heatmaps)
    if "dea" in spec.methods:
        rows += _dea_rows(spec.scene, scene, spec.alpha_values, spec.sources,
                          spec.n_dir, elem_len, spec.dea_quadrature,
                          out_dir, spec.heatmaps, spec.heatmap_resolution)

    rows.sort(key=lambda r: (r[0], r[1], r[2], r[3], r[4]))
    path = out_dir / "sweep.csv"
    with open(path, "w", newline="") as fh:
        fh.write(f"# cavityflux sweep, generated {time.strftime('%Y-%m-%dT%H:%M:%S')}\n")
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in rows:
            writer.writerow([r[0], r[1], f"{r[2]:.10g}", r[3], r[4],
                             f"{r[5]:.12g}", f"{r[6]:.6g}", f"{r[7]:.1f}", r[8]])
    return path


def read_rows(path) -> list:
    """Parse a sweep CSV back into dict rows (timestamp comment skipped)."""
    rows = []
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.DictReader(lines)
    for rec in reader:
        rec["alpha"] = float(rec["alpha"])
        rec["power"] = float(rec["power"])
        rec["defect"] = float(rec["defect"])
        rows.append(rec)
    return rows


DEFAULT_BANDS = [
    {"methods": ["rt", "dea"], "alpha_min": 0.0, "alpha_max": 1.0,
     "max_rel": 0.05, "expected_fail": False},
]


def compare(csv_paths: Sequence, bands: Optional[list] = None) -> dict:
    """Cross-method comparison of overlapping sweep rows.

    Returns a summary with per-band deviations; "ok" is True iff every band
    not marked expected_fail stays inside its tolerance.  Rows are keyed by
    (scene, alpha, source, port); a method missing a key that another method
    has is reported under "missing".
    """
    bands = DEFAULT_BANDS if bands is None else bands
    by_key = {}
    for path in csv_paths:
        for rec in read_rows(path):
            key = (rec["scene"], rec["alpha"], rec["source"], rec["port"])
            by_key.setdefault(key, {})[rec["method"]] = rec["power"]

    all_methods = sorted({m for v in by_key.values() for m in v})
    missing = {}
    for key, methods in by_key.items():
        absent = [m for m in all_methods if m not in methods]
        if absent:
            missing[key] = absent

    summary = {"bands": [], "missing": missing, "ok": True}
    for band in bands:
        m1, m2 = band["methods"]
        devs = []
        for (scene, alpha, source, port), methods in sorted(by_key.items()):
            if m1 not in methods or m2 not in methods:
                continue
            if not band.get("alpha_min", 0.0) <= alpha <= band.get("alpha_max", 1.0):
                continue
            a, b = methods[m1], methods[m2]
            denom = max(abs(a), abs(b), 1e-300)
            devs.append(abs(a - b) / denom)
        entry = {"methods": [m1, m2],
                 "alpha_range": [band.get("alpha_min", 0.0),
                                 band.get("alpha_max", 1.0)],
                 "n": len(devs),
                 "max_rel": max(devs) if devs else 0.0,
                 "mean_rel": (sum(devs) / len(devs)) if devs else 0.0,
                 "tolerance": band["max_rel"],
                 "expected_fail": bool(band.get("expected_fail", False))}
        entry["pass"] = entry["max_rel"] <= band["max_rel"]
        if not entry["pass"] and not entry["expected_fail"]:
            summary["ok"] = False
        summary["bands"].append(entry)
    return summary


def load_bands(path) -> list:
    with open(path) as fh:
        return json.load(fh)


def parse_source(text: str) -> Source:
    """Parse `port:ID`, `point:x,y`, or `table1:N` (N in 1..7)."""
    kind, _, rest = text.partition(":")
    if kind == "port":
        return Source.port_normal(rest)
    if kind == "point":
        x, y = (float(v) for v in rest.split(","))
        return Source.point_isotropic(x, y)
    if kind == "table1":
        idx = int(rest)
        if not 1 <= idx <= len(TABLE1_SOURCES):
            raise ValueError(f"table1 index must be 1..{len(TABLE1_SOURCES)}")
        return TABLE1_SOURCES[idx - 1]
    raise ValueError(f"cannot parse source {text!r}")
