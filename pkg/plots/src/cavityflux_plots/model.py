"""Input model: the sweep CSV schema and the heatmap CSV + JSON sidecar.

This package is deliberately independent of the simulator: it consumes only
the documented file formats, so it can be installed and run on CSVs produced
anywhere.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

SWEEP_COLUMNS = ["scene", "method", "alpha", "source", "port", "power",
                 "defect", "runtime_ms", "resolution"]

KINDS = ("alpha-sweep", "source-sweep", "heatmap")


class SchemaError(ValueError):
    """Raised when an input file does not match the documented schema."""


@dataclass(frozen=True)
class PlotSpec:
    """What to draw: input files, figure kind, output path, series selection."""

    csv_paths: Sequence[str]
    kind: str
    out_path: str
    methods: Optional[Sequence[str]] = None  # None: every method present
    ports: Optional[Sequence[str]] = None    # None: every port present
    scenes: Optional[Sequence[str]] = None   # None: every scene present
    reference: Optional[float] = 0.44  # horizontal guide (source-sweep only)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.csv_paths:
            raise ValueError("csv_paths must be non-empty")


def read_sweep(paths: Sequence[str]) -> list:
    """Parse sweep CSVs into dict rows; leading '#' comment lines are skipped."""
    rows = []
    for path in paths:
        with open(path) as fh:
            lines = [ln for ln in fh if not ln.startswith("#")]
        reader = csv.DictReader(lines)
        found = reader.fieldnames or []
        if found != SWEEP_COLUMNS:
            raise SchemaError(
                f"{path}: expected columns {SWEEP_COLUMNS}, found {found}")
        for rec in reader:
            rec["alpha"] = float(rec["alpha"])
            rec["power"] = float(rec["power"])
            rows.append(rec)
    return rows


def select(rows: list, spec: PlotSpec) -> list:
    out = rows
    if spec.scenes is not None:
        out = [r for r in out if r["scene"] in spec.scenes]
    if spec.methods is not None:
        out = [r for r in out if r["method"] in spec.methods]
    if spec.ports is not None:
        out = [r for r in out if r["port"] in spec.ports]
    return out


@dataclass(frozen=True)
class Heatmap:
    values: np.ndarray  # (ny, nx), row 0 at the bottom
    origin: tuple
    cell_size: float
    meta: dict = field(default_factory=dict)

    @property
    def extent(self):
        ny, nx = self.values.shape
        x0, y0 = self.origin
        return (x0, x0 + nx * self.cell_size, y0, y0 + ny * self.cell_size)


def read_heatmap(csv_path: str, meta_path: Optional[str] = None) -> Heatmap:
    """Load a heatmap matrix CSV with its JSON sidecar (default: same stem)."""
    if meta_path is None:
        meta_path = str(Path(csv_path).with_suffix(".meta"))
    try:
        with open(meta_path) as fh:
            meta = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read heatmap sidecar {meta_path}: {exc}") from exc
    for key in ("origin", "cell_size"):
        if key not in meta:
            raise SchemaError(f"{meta_path}: sidecar lacks required key {key!r}")
    values = np.loadtxt(csv_path, delimiter=",", ndmin=2)
    return Heatmap(values=values, origin=tuple(meta["origin"]),
                   cell_size=float(meta["cell_size"]), meta=meta)


def parse_point_source(label: str):
    """(x, y) for `point:x,y` source labels, else None."""
    kind, _, rest = label.partition(":")
    if kind != "point":
        return None
    x, y = (float(v) for v in rest.split(","))
    return x, y
