"""Transfer-operator energy analysis on boundary phase space.

The boundary is discretized into elements (geometry.discretize) and outgoing
directions into equal-measure bins of p = sin(theta) in (-1, 1), theta taken
from the inward normal.  A cell (element, bin) holds the power flux leaving a
reflecting element or arriving at a port element.  One application of the
operator moves flux along a free flight to the next boundary element, scaling
by the reflectivity (1 - alpha) when the target reflects.  Exterior port
cells absorb (their columns are zero); inter-cavity aperture elements are
fully transparent: rays cross them unchanged during assembly, so transported
flux is never re-binned mid-flight and aperture cells stay empty.

The equilibrium density solves (1 - L) rho = rho0 with rho0 the one-step
propagated image of the physical source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .geometry import (BEHAVIOR_REFLECT, KIND_APERTURE,
                       RAY_EPS, Discretization, Scene, SceneError, _rot90)
from .grids import DensityGrid
from .raytrace import Source

_P_CLIP = 1.0 - 1e-12
_DENSE_SOLVE_MAX = 4000


class DeaError(RuntimeError):
    """Raised when the linear system is singular or fails to converge."""


@dataclass(frozen=True)
class PhaseSpaceBasis:
    """Boundary elements crossed with equal-measure direction bins."""

    discretization: Discretization
    n_dir: int = 64

    def __post_init__(self):
        if self.n_dir < 1:
            raise ValueError("n_dir must be >= 1")

    @property
    def scene(self) -> Scene:
        return self.discretization.scene

    @property
    def n_cells(self) -> int:
        return self.discretization.n_elements * self.n_dir

    @property
    def bin_width(self) -> float:
        return 2.0 / self.n_dir

    def cell_of(self, element, p):
        """Cell indices for elements and direction coordinates p = d . tangent."""
        p = np.clip(np.asarray(p, dtype=float), -_P_CLIP, _P_CLIP)
        b = np.minimum((p + 1.0) / self.bin_width, self.n_dir - 1).astype(np.int64)
        return np.asarray(element, dtype=np.int64) * self.n_dir + b

    def cell_split(self, element, p):
        """Linear split of arrivals between the two nearest direction bins.

        Nearest-bin deposition loses the sub-bin direction information and acts
        as strong angular diffusion over many flights; splitting the weight so
        the mean of the deposit equals the true arrival p removes that
        first-order error.  Returns (cell_lo, cell_hi, weight_hi); the low bin
        receives 1 - weight_hi.
        """
        p = np.clip(np.asarray(p, dtype=float), -_P_CLIP, _P_CLIP)
        x = (p + 1.0) / self.bin_width - 0.5  # in bin-center coordinates
        lo = np.floor(x).astype(np.int64)
        w_hi = x - lo
        hi = np.clip(lo + 1, 0, self.n_dir - 1)
        lo = np.clip(lo, 0, self.n_dir - 1)
        base = np.asarray(element, dtype=np.int64) * self.n_dir
        return base + lo, base + hi, w_hi

    def deposit_split(self, ent, param, p):
        """Bilinear deposit of arrivals over position and direction neighbours.

        Splitting in both coordinates preserves the first moments of every
        arrival, so the per-flight truncation error of the piecewise-constant
        representation is second order in the cell size instead of first.
        Position weight never crosses an entity boundary (openings are their
        own entities, so port/wall semantics cannot leak); disc entities wrap
        around.  Returns (cells, weights) with shape (4, n).
        """
        d = self.discretization
        ent = np.asarray(ent, dtype=np.int64)
        x = np.asarray(param, dtype=float) / d.entity_step[ent] - 0.5
        lo = np.floor(x).astype(np.int64)
        w_pos = x - lo
        hi = lo + 1
        count = d.entity_count[ent]
        is_disc = ent >= d.scene.n_segments
        lo = np.where(is_disc, np.mod(lo, count), np.clip(lo, 0, count - 1))
        hi = np.where(is_disc, np.mod(hi, count), np.clip(hi, 0, count - 1))
        off = d.entity_offset[ent]
        c_ll, c_lh, w_dir = self.cell_split(off + lo, p)
        c_hl, c_hh, _ = self.cell_split(off + hi, p)
        cells = np.stack([c_ll, c_lh, c_hl, c_hh])
        weights = np.stack([(1 - w_pos) * (1 - w_dir), (1 - w_pos) * w_dir,
                            w_pos * (1 - w_dir), w_pos * w_dir])
        return cells, weights

    def opening_cells(self, opening_id: str, cavity: Optional[str] = None):
        elems = self.discretization.opening_elements(opening_id, cavity)
        return (elems[:, None] * self.n_dir + np.arange(self.n_dir)[None, :]).ravel()

    def indicator(self, opening_id: str, cavity: Optional[str] = None) -> np.ndarray:
        """The 0/1 port state vector supported on one opening's cells."""
        chi = np.zeros(self.n_cells)
        chi[self.opening_cells(opening_id, cavity)] = 1.0
        return chi

    def reflect_cells(self) -> np.ndarray:
        """Boolean mask of cells that belong to reflecting elements."""
        return np.repeat(self.discretization.behavior == BEHAVIOR_REFLECT,
                         self.n_dir)


@dataclass
class TransferOperator:
    """Raw flight matrix plus the alpha-dependent row scaling.

    raw[(target cell), (source cell)] holds the flight fraction before wall
    absorption; scale(alpha) multiplies rows of reflecting cells by (1-alpha).
    """

    basis: PhaseSpaceBasis
    raw: sp.csr_matrix
    reflect_row: np.ndarray

    def scale(self, alpha: float) -> sp.csr_matrix:
        if not 0.0 <= alpha <= 1.0:
            raise ValueError("alpha must be in [0, 1]")
        r = np.where(self.reflect_row, 1.0 - alpha, 1.0)
        return sp.diags(r).dot(self.raw).tocsr()

    def matrix(self) -> sp.csr_matrix:
        return self.scale(self.basis.scene.alpha)


def _emission_rays(basis: PhaseSpaceBasis, cells: np.ndarray,
                   qp: int, qd: int):
    """Deterministic quadrature rays for the given emitting cells.

    Positions are stratified along each element; direction coordinates are
    stratified within the cell's p-bin (equal-p sampling is flux weighted).
    Returns (origins, directions, source_cell) flattened over cells x qp x qd.
    """
    d = basis.discretization
    n_dir = basis.n_dir
    elem = cells // n_dir
    bins = cells % n_dir

    frac = (np.arange(qp) + 0.5) / qp
    elem_rep = np.repeat(elem, qp)
    pts, nrm = d.point_at(elem_rep, np.tile(frac, len(elem)))
    tan = _rot90(nrm)

    bw = basis.bin_width
    p_lo = -1.0 + np.repeat(bins, qp) * bw
    p = p_lo[:, None] + (np.arange(qd)[None, :] + 0.5) / qd * bw  # (C*qp, qd)
    cos_t = np.sqrt(1.0 - p * p)

    dirs = (nrm[:, None, :] * cos_t[:, :, None]
            + tan[:, None, :] * p[:, :, None])  # (C*qp, qd, 2)
    origins = pts[:, None, :] + RAY_EPS * dirs
    src = np.repeat(cells, qp * qd)
    return origins.reshape(-1, 2), dirs.reshape(-1, 2), src


def _propagate(scene: Scene, origins: np.ndarray, dirs: np.ndarray,
               max_crossings: int = 64):
    """Trace rays to their first non-aperture boundary hit.

    Inter-cavity apertures transmit rays unchanged, exactly as in the
    Monte-Carlo tracer, so transported flux is never re-binned mid-flight.
    Returns (entity, param, directions, legs); legs is a list of
    (ray_indices, starts, ends) straight flight segments for chord tallies.
    """
    n = len(origins)
    ent_out = np.full(n, -1, dtype=np.int64)
    par_out = np.zeros(n)
    idx = np.arange(n)
    O, D = origins, dirs
    legs = []
    for _ in range(max_crossings):
        if not len(idx):
            break
        ent, _, pt, _, param = scene.first_hit_batch(O, D)
        legs.append((idx, O, pt))
        is_ap = (ent < scene.n_segments) & (scene.seg_kind[np.minimum(
            ent, scene.n_segments - 1)] == KIND_APERTURE)
        done = ~is_ap
        ent_out[idx[done]] = ent[done]
        par_out[idx[done]] = param[done]
        idx, D = idx[is_ap], D[is_ap]
        O = pt[is_ap] + RAY_EPS * D
    if len(idx):
        raise SceneError("ray crossed apertures more times than geometrically "
                         "possible; scene is inconsistent")
    return ent_out, par_out, dirs, legs


def _arrival_p(basis: PhaseSpaceBasis, ent, param, dirs):
    """Direction coordinate at arrival via the tangent at the actual hit point."""
    scene = basis.scene
    # Tangent at the actual hit point (varies along disc arcs).
    nrm = np.empty_like(dirs)
    seg = ent < scene.n_segments
    if np.any(seg):
        nrm[seg] = scene.seg_n[ent[seg]]
    if np.any(~seg):
        ang = param[~seg]
        nrm[~seg] = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
    tan = _rot90(nrm)
    return np.einsum("nd,nd->n", dirs, tan)


def assemble(scene: Scene, basis: PhaseSpaceBasis, quadrature: tuple = (4, 4),
             chunk_cells: int = 16384) -> TransferOperator:
    """Build the transfer operator by stratified ray quadrature per source cell.

    quadrature = (positions per element, directions per bin).  The matrix is
    fully deterministic; wall absorption enters only through scale(alpha), so
    one assembly serves every alpha.
    """
    qp, qd = quadrature
    if qp < 1 or qd < 1:
        raise ValueError("quadrature counts must be >= 1")
    d = basis.discretization
    if d.scene is not scene and d.scene.n_entities != scene.n_entities:
        raise SceneError("basis was discretized from a different scene")
    emitting = np.nonzero(np.repeat(d.behavior == BEHAVIOR_REFLECT, basis.n_dir))[0]
    weight = 1.0 / (qp * qd)

    rows, cols, vals = [], [], []
    for start in range(0, len(emitting), chunk_cells):
        cells = emitting[start:start + chunk_cells]
        O, D, src = _emission_rays(basis, cells, qp, qd)
        ent, param, D, _ = _propagate(scene, O, D)
        p = _arrival_p(basis, ent, param, D)
        tgt, w = basis.deposit_split(ent, param, p)
        rows.append(tgt.ravel())
        cols.append(np.broadcast_to(src, tgt.shape).ravel())
        vals.append(weight * w.ravel())

    n = basis.n_cells
    rows = np.concatenate(rows) if rows else np.empty(0, dtype=np.int64)
    cols = np.concatenate(cols) if cols else np.empty(0, dtype=np.int64)
    vals = np.concatenate(vals) if vals else np.empty(0)
    raw = sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
    raw.eliminate_zeros()
    return TransferOperator(basis=basis, raw=raw,
                            reflect_row=basis.reflect_cells())


def source_vector(scene: Scene, basis: PhaseSpaceBasis, source: Source,
                  n_rays: int = 4096) -> np.ndarray:
    """One-step propagated source image rho0 (reflectivity applied on arrival)."""
    if source.kind == "port":
        oi = scene.opening_index(source.port)
        segs = np.nonzero(scene.seg_opening == oi)[0]
        if len(segs) == 0:
            raise SceneError(f"unknown source port {source.port!r}")
        si = int(segs[0])
        u = (np.arange(n_rays) + 0.5) / n_rays * scene.seg_len[si]
        O = scene.seg_p0[si] + u[:, None] * scene.seg_dir[si]
        D = np.broadcast_to(scene.seg_n[si], (n_rays, 2)).copy()
        O = O + RAY_EPS * D
    elif source.kind == "point":
        p = np.asarray(source.point, dtype=float)
        if scene.contains_point(p, margin=RAY_EPS) is None:
            raise SceneError(f"point source {tuple(p)} is not strictly inside a cavity")
        phi = 2 * np.pi * (np.arange(n_rays) + 0.5) / n_rays
        D = np.stack([np.cos(phi), np.sin(phi)], axis=1)
        O = np.broadcast_to(p, (n_rays, 2)).copy()
    else:
        raise ValueError(f"unknown source kind {source.kind!r}")

    ent, param, D, _ = _propagate(scene, O, D)
    p = _arrival_p(basis, ent, param, D)
    tgt, w = basis.deposit_split(ent, param, p)
    rho0 = np.zeros(basis.n_cells)
    np.add.at(rho0, tgt.ravel(), source.total_power / n_rays * w.ravel())
    rho0[basis.reflect_cells()] *= (1.0 - scene.alpha)
    return rho0


def spectral_radius_estimate(L: sp.csr_matrix, iters: int = 200,
                             seed: int = 0) -> float:
    """Power-iteration estimate; L is non-negative so the plain iteration works."""
    rng = np.random.default_rng(seed)
    v = rng.random(L.shape[0])
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(iters):
        w = L @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        lam = nw
        v = w / nw
    return float(lam)


def solve(L: sp.csr_matrix, rho0: np.ndarray, tol: float = 1e-10,
          max_iter: int = 200_000) -> np.ndarray:
    """Solve (1 - L) rho = rho0 to a relative residual below tol.

    Direct dense solve for small systems; otherwise an accumulated Neumann
    iteration, whose truncation term equals the residual of the partial sum.
    Accepts a single vector or a (n, k) stack of right-hand sides.
    """
    rho0 = np.asarray(rho0, dtype=float)
    single = rho0.ndim == 1
    b = rho0[:, None] if single else rho0
    n = L.shape[0]
    if n <= _DENSE_SOLVE_MAX:
        A = np.eye(n) - L.toarray()
        try:
            x = np.linalg.solve(A, b)
        except np.linalg.LinAlgError as exc:
            raise DeaError(f"singular system: {exc}") from exc
    else:
        x = b.copy()
        term = b.copy()
        b_norm = np.maximum(np.abs(b).sum(axis=0), 1e-300)
        prev = np.abs(term).sum(axis=0)
        ratio = 0.0
        for it in range(max_iter):
            term = L @ term
            x += term
            cur = np.abs(term).sum(axis=0)
            rel = float(np.max(cur / b_norm))
            if rel < tol:
                break
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = float(np.max(np.where(prev > 0, cur / prev, 0.0)))
            if it > 50 and ratio >= 1.0:
                raise DeaError(
                    "Neumann iteration is not contracting "
                    f"(spectral radius estimate {ratio:.6f}); the scene is "
                    "lossless and closed")
            prev = cur
        else:
            raise DeaError(
                f"no convergence in {max_iter} iterations "
                f"(spectral radius estimate {ratio:.6f})")
    resid = b - (x - L @ x)
    rel_res = float(np.max(np.abs(resid).sum(axis=0)
                           / np.maximum(np.abs(b).sum(axis=0), 1e-300)))
    if rel_res > 10 * max(tol, 1e-14):
        raise DeaError(f"solution residual {rel_res:.3e} exceeds tolerance {tol:.3e}")
    return x[:, 0] if single else x


def port_flux(basis: PhaseSpaceBasis, rho: np.ndarray, opening_id: str,
              cavity: Optional[str] = None) -> float:
    """Power through one opening: <rho, chi> with chi the opening indicator."""
    cells = basis.opening_cells(opening_id, cavity)
    return float(np.sum(np.asarray(rho)[cells], axis=0))


def adjoint(L: sp.csr_matrix, chi: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Sensitivity density: solves the transposed system driven by chi."""
    return solve(sp.csr_matrix(L.T), chi, tol=tol)


def spatial_map(scene: Scene, basis: PhaseSpaceBasis, density: np.ndarray,
                resolution: float, quadrature: tuple = (1, 2),
                source: Optional[Source] = None, source_rays: int = 4096,
                chunk_cells: int = 16384) -> DensityGrid:
    """Project a phase-space density to an interior energy-density grid.

    Every emitting cell contributes its flux along its free-flight chords
    (chord length x flux / cell area); port cells hold terminal flux and emit
    nothing.  Pass the driving source to include the direct (pre-boundary)
    flights of a solved equilibrium density.
    """
    lo, hi = scene.bounding_box()
    grid = DensityGrid.for_box(lo, hi, resolution)
    d = basis.discretization
    density = np.asarray(density, dtype=float)
    qp, qd = quadrature
    weight = 1.0 / (qp * qd)

    emitting = np.repeat(d.behavior == BEHAVIOR_REFLECT, basis.n_dir)
    cells_all = np.nonzero(emitting & (density > 0))[0]
    for start in range(0, len(cells_all), chunk_cells):
        cells = cells_all[start:start + chunk_cells]
        O, D, src = _emission_rays(basis, cells, qp, qd)
        _, _, _, legs = _propagate(scene, O, D)
        for ray_idx, starts, ends in legs:
            grid.deposit_chords(starts, ends, density[src[ray_idx]] * weight)

    if source is not None:
        O, D, E = _source_fan(scene, source, source_rays)
        _, _, _, legs = _propagate(scene, O, D)
        for ray_idx, starts, ends in legs:
            grid.deposit_chords(starts, ends, E[ray_idx])
    return grid


def _source_fan(scene: Scene, source: Source, n_rays: int):
    if source.kind == "port":
        oi = scene.opening_index(source.port)
        si = int(np.nonzero(scene.seg_opening == oi)[0][0])
        u = (np.arange(n_rays) + 0.5) / n_rays * scene.seg_len[si]
        O = scene.seg_p0[si] + u[:, None] * scene.seg_dir[si]
        D = np.broadcast_to(scene.seg_n[si], (n_rays, 2)).copy()
        O = O + RAY_EPS * D
    else:
        p = np.asarray(source.point, dtype=float)
        phi = 2 * np.pi * (np.arange(n_rays) + 0.5) / n_rays
        D = np.stack([np.cos(phi), np.sin(phi)], axis=1)
        O = np.broadcast_to(p, (n_rays, 2)).copy()
    return O, D, np.full(n_rays, source.total_power / n_rays)
