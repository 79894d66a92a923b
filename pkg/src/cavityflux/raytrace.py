"""Forward Monte-Carlo ray transport with per-reflection absorption.

Rays carry scalar energy, reflect specularly off walls and scatterers
(depositing a fraction alpha at every reflection, independent of incidence
angle), pass through inter-cavity apertures unchanged, and exit at ports.
Truncated energy (bounce cap or cutoff) is reported as residual so the tally
always closes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .geometry import (KIND_APERTURE, KIND_PORT, KIND_WALL, RAY_EPS,
                       GeometryError, Scene, SceneError)
from .grids import DensityGrid


@dataclass(frozen=True)
class RtConfig:
    n_rays: int = 8002
    max_bounces: int = 10_000
    energy_cutoff: float = 1e-12  # fraction of a ray's initial energy
    rng_seed: int = 0
    grid_resolution: Optional[float] = None  # cells per unit length

    def __post_init__(self):
        if self.n_rays < 1:
            raise ValueError("n_rays must be >= 1")
        if self.max_bounces < 1:
            raise ValueError("max_bounces must be >= 1")
        if not 0.0 <= self.energy_cutoff < 1.0:
            raise ValueError("energy_cutoff must be in [0, 1)")


@dataclass(frozen=True)
class Source:
    """Either a port-normal fan ("port", id) or an isotropic point source."""

    kind: str  # "port" | "point"
    port: Optional[str] = None
    point: Optional[tuple] = None
    total_power: float = 1.0

    @classmethod
    def port_normal(cls, port_id: str) -> "Source":
        return cls(kind="port", port=port_id)

    @classmethod
    def point_isotropic(cls, x: float, y: float) -> "Source":
        return cls(kind="point", point=(float(x), float(y)))

    def label(self) -> str:
        if self.kind == "port":
            return f"port:{self.port}"
        return f"point:{self.point[0]:g},{self.point[1]:g}"


@dataclass(frozen=True)
class PowerReport:
    p_port: dict  # exterior opening id -> exit power
    p_wall: dict  # cavity id -> absorbed power
    p_residual: float
    defect: float  # |injected - accounted|

    def total_port(self) -> float:
        return math.fsum(self.p_port.values())


def _launch(scene: Scene, source: Source, rt: RtConfig):
    """Starting points, directions and per-ray energies; deterministic per seed."""
    rng = np.random.default_rng(rt.rng_seed)
    n = rt.n_rays
    e0 = source.total_power / n
    if source.kind == "port":
        oi = scene.opening_index(source.port)
        segs = np.nonzero(scene.seg_opening == oi)[0]
        if len(segs) == 0 or scene.seg_kind[segs[0]] != KIND_PORT:
            raise SceneError(f"source port {source.port!r} is not an exterior port")
        si = int(segs[0])
        jitter = rng.random(n)
        u = (np.arange(n) + jitter) / n * scene.seg_len[si]
        origins = scene.seg_p0[si] + u[:, None] * scene.seg_dir[si]
        direction = scene.seg_n[si]  # launched along the inward normal
        dirs = np.broadcast_to(direction, (n, 2)).copy()
        origins = origins + RAY_EPS * dirs
    elif source.kind == "point":
        p = np.asarray(source.point, dtype=float)
        if scene.contains_point(p, margin=RAY_EPS) is None:
            raise SceneError(f"point source {tuple(p)} is not strictly inside a cavity")
        jitter = rng.random(n)
        phi = 2 * np.pi * (np.arange(n) + jitter) / n
        dirs = np.stack([np.cos(phi), np.sin(phi)], axis=1)
        origins = np.broadcast_to(p, (n, 2)).copy()
    else:
        raise ValueError(f"unknown source kind {source.kind!r}")
    return origins, dirs, np.full(n, e0)


def simulate(scene: Scene, source: Source, rt: RtConfig):
    """Trace a full ensemble; returns (PowerReport, DensityGrid | None).

    Per-ray tallies are kept separately and reduced with compensated summation,
    so the result is independent of any batch partitioning and bitwise
    reproducible for a fixed seed.
    """
    origins, dirs, energies = _launch(scene, source, rt)
    n = rt.n_rays
    port_ids = [op.id for op in scene.openings if op.kind == "port"]
    port_col = {scene.opening_index(pid): k for k, pid in enumerate(port_ids)}
    n_cav = len(scene.cavities)

    port_e = np.zeros((n, len(port_ids)))
    wall_e = np.zeros((n, n_cav))
    residual_e = np.zeros(n)

    grid = None
    if rt.grid_resolution is not None:
        lo, hi = scene.bounding_box()
        grid = DensityGrid.for_box(lo, hi, rt.grid_resolution)

    ent_kind = np.concatenate([scene.seg_kind,
                               np.full(scene.n_discs, KIND_WALL, dtype=np.int64)])
    ent_cav = np.concatenate([scene.seg_cavity, scene.disc_cavity]) \
        if scene.n_discs else scene.seg_cavity.copy()
    ent_open = np.concatenate([scene.seg_opening,
                               np.full(scene.n_discs, -1, dtype=np.int64)])

    idx = np.arange(n)
    O, D, E = origins, dirs, energies
    cutoff = rt.energy_cutoff * energies  # per-ray absolute threshold
    thresh = cutoff.copy()
    bounces = np.zeros(n, dtype=np.int64)
    alpha = scene.alpha

    while len(idx):
        ent, t, pt, nrm, _ = scene.first_hit_batch(O, D)
        if grid is not None:
            grid.deposit_chords(O, pt, E)
        kind = ent_kind[ent]

        done = np.zeros(len(idx), dtype=bool)

        is_port = kind == KIND_PORT
        if np.any(is_port):
            cols = np.array([port_col[oi] for oi in ent_open[ent[is_port]]])
            np.add.at(port_e, (idx[is_port], cols), E[is_port])
            done |= is_port

        is_ap = kind == KIND_APERTURE
        if np.any(is_ap):
            # Lossless crossing into the neighbouring cavity; not a bounce.
            O = O.copy()
            O[is_ap] = pt[is_ap] + RAY_EPS * D[is_ap]

        is_wall = kind == KIND_WALL
        if np.any(is_wall):
            np.add.at(wall_e, (idx[is_wall], ent_cav[ent[is_wall]]),
                      alpha * E[is_wall])
            E = E.copy()
            E[is_wall] *= (1.0 - alpha)
            dn = np.einsum("nd,nd->n", D[is_wall], nrm[is_wall])
            D = D.copy()
            refl = D[is_wall] - 2.0 * dn[:, None] * nrm[is_wall]
            refl /= np.hypot(refl[:, 0], refl[:, 1])[:, None]
            D[is_wall] = refl
            O[is_wall] = pt[is_wall] + RAY_EPS * D[is_wall]
            bounces = bounces.copy()
            bounces[is_wall] += 1
            dead = is_wall & ((E < thresh) | (bounces >= rt.max_bounces))
            if np.any(dead):
                np.add.at(residual_e, idx[dead], E[dead])
                done |= dead

        keep = ~done
        idx, O, D, E, bounces, thresh = (idx[keep], O[keep], D[keep], E[keep],
                                         bounces[keep], thresh[keep])

    p_port = {pid: math.fsum(port_e[:, k]) for k, pid in enumerate(port_ids)}
    p_wall = {cav.id: math.fsum(wall_e[:, ci])
              for ci, cav in enumerate(scene.cavities)}
    p_res = math.fsum(residual_e)
    accounted = math.fsum([*p_port.values(), *p_wall.values(), p_res])
    report = PowerReport(p_port=p_port, p_wall=p_wall, p_residual=p_res,
                         defect=abs(source.total_power - accounted))
    return report, grid


@dataclass
class RayOutcome:
    """Replayable single-ray history: (entity, point, energy after interaction)."""

    events: list
    exit_port: Optional[str]
    energy_out: float
    residual: float
    bounces: int


def trace_one(scene: Scene, origin, direction, rt: RtConfig) -> RayOutcome:
    """Trace one ray with unit energy; shares the intersection kernel with simulate."""
    O = np.asarray(origin, dtype=float).reshape(1, 2)
    D = np.asarray(direction, dtype=float).reshape(1, 2)
    E = 1.0
    alpha = scene.alpha
    events = []
    bounces = 0
    while True:
        ent, t, pt, nrm, _ = scene.first_hit_batch(O, D)
        ei = int(ent[0])
        kind = scene.entity_kind(ei)
        if kind == KIND_PORT:
            events.append((ei, pt[0].copy(), E))
            oid = scene.openings[scene.entity_opening(ei)].id
            return RayOutcome(events, oid, E, 0.0, bounces)
        if kind == KIND_APERTURE:
            events.append((ei, pt[0].copy(), E))
            O = pt + RAY_EPS * D
            continue
        E *= (1.0 - alpha)
        dn = float(D[0] @ nrm[0])
        D = D - 2.0 * dn * nrm
        D = D / np.hypot(D[:, 0], D[:, 1])[:, None]
        O = pt + RAY_EPS * D
        bounces += 1
        events.append((ei, pt[0].copy(), E))
        if E < rt.energy_cutoff or bounces >= rt.max_bounces:
            return RayOutcome(events, None, 0.0, E, bounces)
