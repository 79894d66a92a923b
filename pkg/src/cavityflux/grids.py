"""Interior energy-density grids and chord rasterization.

Both the Monte-Carlo tracer and the transfer-operator solver report interior
energy density as path-length-weighted power per unit area on a regular grid
covering the scene bounding box.  Chords are rasterized by dense point
sampling, which is adequate for the qualitative heatmaps these grids feed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class DensityGrid:
    origin: np.ndarray  # lower-left corner
    cell_size: float
    values: np.ndarray  # (ny, nx), non-negative

    @classmethod
    def for_box(cls, lo, hi, resolution: float) -> "DensityGrid":
        """Grid covering [lo, hi] at `resolution` cells per unit length."""
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        cell = 1.0 / float(resolution)
        nx = max(1, int(np.ceil((hi[0] - lo[0]) / cell - 1e-12)))
        ny = max(1, int(np.ceil((hi[1] - lo[1]) / cell - 1e-12)))
        return cls(origin=lo, cell_size=cell, values=np.zeros((ny, nx)))

    @property
    def shape(self):
        return self.values.shape

    def cell_centers(self):
        ny, nx = self.values.shape
        xs = self.origin[0] + (np.arange(nx) + 0.5) * self.cell_size
        ys = self.origin[1] + (np.arange(ny) + 0.5) * self.cell_size
        return xs, ys

    def deposit_chords(self, starts: np.ndarray, ends: np.ndarray,
                       powers: np.ndarray, samples_per_cell: int = 3):
        """Accumulate power x traversed-length / cell-area along straight chords."""
        starts = np.atleast_2d(starts)
        ends = np.atleast_2d(ends)
        powers = np.atleast_1d(powers).astype(float)
        seg = ends - starts
        lengths = np.hypot(seg[:, 0], seg[:, 1])
        ds = self.cell_size / samples_per_cell
        counts = np.maximum(1, np.ceil(lengths / ds - 1e-12).astype(np.int64))
        # Linear density (power per unit length) sampled at count midpoints.
        total = int(counts.sum())
        if total == 0:
            return
        chord_idx = np.repeat(np.arange(len(lengths)), counts)
        # Fractional positions (k + 0.5) / count along each chord.
        k = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        frac = (k + 0.5) / counts[chord_idx]
        pts = starts[chord_idx] + frac[:, None] * seg[chord_idx]
        step = lengths[chord_idx] / counts[chord_idx]
        weight = powers[chord_idx] * step / self.cell_size ** 2
        ny, nx = self.values.shape
        ix = np.clip(((pts[:, 0] - self.origin[0]) / self.cell_size).astype(np.int64),
                     0, nx - 1)
        iy = np.clip(((pts[:, 1] - self.origin[1]) / self.cell_size).astype(np.int64),
                     0, ny - 1)
        np.add.at(self.values, (iy, ix), weight)

    def save_csv(self, path: str, meta_path: str, metadata: dict | None = None):
        """Write the matrix as CSV rows (row 0 = bottom) with a JSON sidecar."""
        import json

        np.savetxt(path, self.values, delimiter=",", fmt="%.10g")
        ny, nx = self.values.shape
        meta = {"origin": [float(self.origin[0]), float(self.origin[1])],
                "cell_size": self.cell_size, "nx": nx, "ny": ny,
                "row0": "bottom"}
        if metadata:
            meta.update(metadata)
        with open(meta_path, "w") as fh:
            json.dump(meta, fh, indent=2)

    @classmethod
    def load_csv(cls, path: str, meta_path: str) -> "DensityGrid":
        import json

        with open(meta_path) as fh:
            meta = json.load(fh)
        values = np.loadtxt(path, delimiter=",", ndmin=2)
        return cls(origin=np.array(meta["origin"], dtype=float),
                   cell_size=float(meta["cell_size"]), values=values)
