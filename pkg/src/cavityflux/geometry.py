"""Scene construction, boundary discretization, and first-intersection ray queries.

Scenes are collections of axis-aligned square cavities whose walls may carry
openings (exterior ports or inter-cavity apertures) and whose interiors may
contain circular scatterers.  All boundary pieces are one-sided: a segment is
hit only by rays approaching from its front (the side its inward normal points
to), which lets two coincident segments represent the two faces of a shared
wall without ambiguity.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

# Ray-epsilon policy: advance by RAY_EPS after a reflection to avoid
# self-intersection; disc hits with discriminant below TANGENT_EPS are grazing
# and count as misses.
RAY_EPS = 1e-9
TANGENT_EPS = 1e-12
# Largest angle a single disc element may subtend.  Boundary elements must
# resolve curvature regardless of the flat-wall target length: the surface
# normal rotating within one element acts as angular diffusion on everything
# built on top of the discretization.
MAX_DISC_ELEMENT_ANGLE = 0.1

WALL_SIDES = ("bottom", "right", "top", "left")

# Entity kind codes used in the flattened arrays.
KIND_WALL = 0
KIND_PORT = 1
KIND_APERTURE = 2

# Element behavior codes.
BEHAVIOR_REFLECT = 0
BEHAVIOR_PORT = 1
BEHAVIOR_APERTURE = 2


class SceneError(ValueError):
    """Raised when a scene description violates a geometric invariant."""


class GeometryError(RuntimeError):
    """Raised on internal inconsistencies (e.g. a ray escaping a closed scene)."""


@dataclass(frozen=True)
class Point2:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise SceneError(f"non-finite point ({self.x}, {self.y})")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)


@dataclass(frozen=True)
class Cavity:
    id: str
    origin: Point2
    side: float


@dataclass(frozen=True)
class Opening:
    id: str
    kind: str  # "port" | "aperture"
    cavity: str  # host cavity
    wall_side: str  # bottom/right/top/left of the host cavity
    center_offset: float  # along the wall, from its CCW start
    width: float


@dataclass(frozen=True)
class Disc:
    cavity: str
    center: Point2
    radius: float


@dataclass(frozen=True)
class Hit:
    """First intersection of a ray with the scene boundary."""

    entity: int
    point: np.ndarray
    distance: float
    surface_normal: np.ndarray
    outgoing_direction: np.ndarray
    param: float  # arc-length along a segment entity, angle on a disc entity


def _rot90(v: np.ndarray) -> np.ndarray:
    """Counter-clockwise quarter turn; maps a normal to its tangent."""
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


class Scene:
    """Immutable scene with flattened entity arrays for vectorized queries.

    Entities are indexed 0..n_segments-1 (wall pieces and opening
    cross-sections) followed by n_segments..n_segments+n_discs-1 (scatterers).
    """

    def __init__(self, cavities: Sequence[Cavity], openings: Sequence[Opening],
                 discs: Sequence[Disc], alpha: float):
        if not 0.0 <= alpha <= 1.0:
            raise SceneError(f"alpha must be in [0, 1], got {alpha}")
        self.cavities = tuple(cavities)
        self.openings = tuple(openings)
        self.discs = tuple(discs)
        self.alpha = float(alpha)
        self._cavity_index = {c.id: i for i, c in enumerate(self.cavities)}
        self._opening_index = {o.id: i for i, o in enumerate(self.openings)}
        if len(self._cavity_index) != len(self.cavities):
            raise SceneError("duplicate cavity ids")
        if len(self._opening_index) != len(self.openings):
            raise SceneError("duplicate opening ids")
        self._validate_discs()
        self._build_segments()

    # -- construction helpers -------------------------------------------------

    def _wall_geometry(self, cavity: Cavity, side: str):
        """CCW start point, unit direction and inward normal of one wall."""
        x0, y0, s = cavity.origin.x, cavity.origin.y, cavity.side
        starts = {
            "bottom": (x0, y0), "right": (x0 + s, y0),
            "top": (x0 + s, y0 + s), "left": (x0, y0 + s),
        }
        dirs = {
            "bottom": (1.0, 0.0), "right": (0.0, 1.0),
            "top": (-1.0, 0.0), "left": (0.0, -1.0),
        }
        p0 = np.array(starts[side], dtype=float)
        d = np.array(dirs[side], dtype=float)
        n = _rot90(d)  # CCW boundary: inward is left of travel
        return p0, d, n

    def _validate_discs(self):
        for i, disc in enumerate(self.discs):
            if disc.radius <= 0:
                raise SceneError(f"disc {i}: radius must be positive")
            if disc.cavity not in self._cavity_index:
                raise SceneError(f"disc {i}: unknown cavity {disc.cavity!r}")
            cav = self.cavities[self._cavity_index[disc.cavity]]
            x0, y0, s = cav.origin.x, cav.origin.y, cav.side
            c = disc.center
            if not (x0 + disc.radius < c.x < x0 + s - disc.radius
                    and y0 + disc.radius < c.y < y0 + s - disc.radius):
                raise SceneError(
                    f"disc {i} (cavity {disc.cavity}, center ({c.x}, {c.y}), "
                    f"radius {disc.radius}) is not strictly inside its cavity")
        for i in range(len(self.discs)):
            for j in range(i + 1, len(self.discs)):
                a, b = self.discs[i], self.discs[j]
                d = math.hypot(a.center.x - b.center.x, a.center.y - b.center.y)
                if d <= a.radius + b.radius:
                    raise SceneError(f"discs {i} and {j} overlap")

    def _opening_span(self, op: Opening):
        """World endpoints of an opening along its host wall."""
        cav = self.cavities[self._cavity_index[op.cavity]]
        p0, d, _ = self._wall_geometry(cav, op.wall_side)
        lo = op.center_offset - op.width / 2
        hi = op.center_offset + op.width / 2
        if op.width <= 0:
            raise SceneError(f"opening {op.id}: width must be positive")
        if not (0.0 < lo and hi < cav.side):
            raise SceneError(
                f"opening {op.id} (width {op.width} at offset {op.center_offset}) "
                f"does not lie strictly within its host wall")
        return p0 + lo * d, p0 + hi * d

    def _build_segments(self):
        seg_p0, seg_dir, seg_len, seg_n = [], [], [], []
        seg_kind, seg_cavity, seg_opening = [], [], []

        # Pre-compute opening world spans and count the walls containing each,
        # so aperture gaps are cut from both coincident faces.
        spans = [self._opening_span(op) for op in self.openings]
        containing = [[] for _ in self.openings]  # (cavity_idx, side) per opening
        for ci, cav in enumerate(self.cavities):
            for side in WALL_SIDES:
                p0, d, n = self._wall_geometry(cav, side)
                for oi, (a, b) in enumerate(spans):
                    ua = float(np.dot(a - p0, d))
                    ub = float(np.dot(b - p0, d))
                    off_a = abs(float(np.dot(a - p0, n)))
                    off_b = abs(float(np.dot(b - p0, n)))
                    if off_a < 1e-12 and off_b < 1e-12:
                        lo, hi = min(ua, ub), max(ua, ub)
                        if lo > -1e-12 and hi < cav.side + 1e-12:
                            containing[oi].append((ci, side, lo, hi))

        for oi, op in enumerate(self.openings):
            n_hosts = len(containing[oi])
            if op.kind == "port" and n_hosts != 1:
                raise SceneError(
                    f"port {op.id} must lie on exactly one cavity wall, found {n_hosts}")
            if op.kind == "aperture" and n_hosts != 2:
                raise SceneError(
                    f"aperture {op.id} must lie on a wall shared by two cavities, "
                    f"found {n_hosts}")

        # Per-opening overlap validation within each wall.
        for ci, cav in enumerate(self.cavities):
            for side in WALL_SIDES:
                p0, d, n = self._wall_geometry(cav, side)
                cuts = []
                for oi in range(len(self.openings)):
                    for (cci, cside, lo, hi) in containing[oi]:
                        if cci == ci and cside == side:
                            cuts.append((lo, hi, oi))
                cuts.sort()
                for (l1, h1, o1), (l2, h2, o2) in zip(cuts, cuts[1:]):
                    if h1 > l2 + 1e-12:
                        raise SceneError(
                            f"openings {self.openings[o1].id} and "
                            f"{self.openings[o2].id} overlap on a wall")
                # Emit reflecting pieces between cuts, open pieces at cuts.
                u = 0.0
                for lo, hi, oi in cuts:
                    if lo - u > 1e-12:
                        seg_p0.append(p0 + u * d); seg_dir.append(d)
                        seg_len.append(lo - u); seg_n.append(n)
                        seg_kind.append(KIND_WALL); seg_cavity.append(ci)
                        seg_opening.append(-1)
                    kind = KIND_PORT if self.openings[oi].kind == "port" else KIND_APERTURE
                    seg_p0.append(p0 + lo * d); seg_dir.append(d)
                    seg_len.append(hi - lo); seg_n.append(n)
                    seg_kind.append(kind); seg_cavity.append(ci)
                    seg_opening.append(oi)
                    u = hi
                if cav.side - u > 1e-12:
                    seg_p0.append(p0 + u * d); seg_dir.append(d)
                    seg_len.append(cav.side - u); seg_n.append(n)
                    seg_kind.append(KIND_WALL); seg_cavity.append(ci)
                    seg_opening.append(-1)

        self.seg_p0 = np.array(seg_p0, dtype=float)
        self.seg_dir = np.array(seg_dir, dtype=float)
        self.seg_len = np.array(seg_len, dtype=float)
        self.seg_n = np.array(seg_n, dtype=float)
        self.seg_kind = np.array(seg_kind, dtype=np.int64)
        self.seg_cavity = np.array(seg_cavity, dtype=np.int64)
        self.seg_opening = np.array(seg_opening, dtype=np.int64)
        self.n_segments = len(seg_len)

        self.disc_center = (np.array([[d.center.x, d.center.y] for d in self.discs],
                                     dtype=float).reshape(-1, 2))
        self.disc_radius = np.array([d.radius for d in self.discs], dtype=float)
        self.disc_cavity = np.array(
            [self._cavity_index[d.cavity] for d in self.discs], dtype=np.int64)
        self.n_discs = len(self.discs)
        self.n_entities = self.n_segments + self.n_discs

    # -- queries --------------------------------------------------------------

    def with_alpha(self, alpha: float) -> "Scene":
        """Copy of this scene with a different uniform absorption factor."""
        return Scene(self.cavities, self.openings, self.discs, alpha)

    def cavity_index(self, cavity_id: str) -> int:
        return self._cavity_index[cavity_id]

    def opening_index(self, opening_id: str) -> int:
        try:
            return self._opening_index[opening_id]
        except KeyError:
            raise SceneError(f"unknown opening {opening_id!r}") from None

    def entity_cavity(self, entity: int) -> int:
        if entity < self.n_segments:
            return int(self.seg_cavity[entity])
        return int(self.disc_cavity[entity - self.n_segments])

    def entity_kind(self, entity: int) -> int:
        if entity < self.n_segments:
            return int(self.seg_kind[entity])
        return KIND_WALL

    def entity_opening(self, entity: int) -> int:
        if entity < self.n_segments:
            return int(self.seg_opening[entity])
        return -1

    def bounding_box(self):
        lo = np.array([min(c.origin.x for c in self.cavities),
                       min(c.origin.y for c in self.cavities)])
        hi = np.array([max(c.origin.x + c.side for c in self.cavities),
                       max(c.origin.y + c.side for c in self.cavities)])
        return lo, hi

    def contains_point(self, p, margin: float = 0.0) -> Optional[str]:
        """Cavity id containing p strictly inside (outside all discs), or None."""
        x, y = float(p[0]), float(p[1])
        for disc in self.discs:
            if math.hypot(x - disc.center.x, y - disc.center.y) <= disc.radius + margin:
                return None
        for cav in self.cavities:
            if (cav.origin.x + margin < x < cav.origin.x + cav.side - margin
                    and cav.origin.y + margin < y < cav.origin.y + cav.side - margin):
                return cav.id
        return None

    def first_hit_batch(self, origins: np.ndarray, directions: np.ndarray):
        """Vectorized nearest-hit query.

        Returns (entity, distance, point, normal, param) arrays.  Segments are
        one-sided: only front-facing approaches (d . n < 0) register.  Raises
        GeometryError if any ray misses everything.
        """
        O = np.atleast_2d(np.asarray(origins, dtype=float))
        D = np.atleast_2d(np.asarray(directions, dtype=float))
        n_rays = O.shape[0]
        t_best = np.full(n_rays, np.inf)
        ent_best = np.full(n_rays, -1, dtype=np.int64)
        param_best = np.zeros(n_rays)

        if self.n_segments:
            e = self.seg_dir * self.seg_len[:, None]  # (S, 2)
            denom = D[:, None, 0] * e[None, :, 1] - D[:, None, 1] * e[None, :, 0]
            rel = self.seg_p0[None, :, :] - O[:, None, :]
            with np.errstate(divide="ignore", invalid="ignore"):
                t = (rel[..., 0] * e[None, :, 1] - rel[..., 1] * e[None, :, 0]) / denom
                u = (rel[..., 0] * D[:, None, 1] - rel[..., 1] * D[:, None, 0]) / denom
            front = (D @ self.seg_n.T) < 0.0
            valid = (front & (np.abs(denom) > 0.0) & (t > 0.0)
                     & (u >= -1e-12) & (u <= 1.0 + 1e-12))
            t = np.where(valid, t, np.inf)
            idx = np.argmin(t, axis=1)
            rows = np.arange(n_rays)
            ts = t[rows, idx]
            better = ts < t_best
            t_best = np.where(better, ts, t_best)
            ent_best = np.where(better, idx, ent_best)
            param_best = np.where(
                better,
                np.clip(u[rows, idx], 0.0, 1.0) * self.seg_len[idx],
                param_best)

        if self.n_discs:
            oc = O[:, None, :] - self.disc_center[None, :, :]  # (N, K, 2)
            b = np.einsum("nkd,nd->nk", oc, D)
            c = np.einsum("nkd,nkd->nk", oc, oc) - self.disc_radius[None, :] ** 2
            disc = b * b - c
            with np.errstate(invalid="ignore"):
                tq = -b - np.sqrt(np.where(disc > TANGENT_EPS, disc, np.nan))
            valid = (disc > TANGENT_EPS) & (tq > 0.0) & (c > 0.0)
            tq = np.where(valid, tq, np.inf)
            idx = np.argmin(tq, axis=1)
            rows = np.arange(n_rays)
            ts = tq[rows, idx]
            better = ts < t_best
            if np.any(better):
                with np.errstate(invalid="ignore"):
                    pts = O + ts[:, None] * D  # rows without a disc hit are discarded
                ang = np.arctan2(pts[:, 1] - self.disc_center[idx, 1],
                                 pts[:, 0] - self.disc_center[idx, 0])
                ang = np.mod(ang, 2 * np.pi)
                t_best = np.where(better, ts, t_best)
                ent_best = np.where(better, idx + self.n_segments, ent_best)
                param_best = np.where(better, ang, param_best)

        if np.any(ent_best < 0):
            bad = int(np.argmax(ent_best < 0))
            raise GeometryError(
                f"ray from {O[bad]} along {D[bad]} escaped the scene; "
                "geometry is not closed")

        point = O + t_best[:, None] * D
        normal = np.empty_like(point)
        seg_mask = ent_best < self.n_segments
        if np.any(seg_mask):
            normal[seg_mask] = self.seg_n[ent_best[seg_mask]]
        if np.any(~seg_mask):
            di = ent_best[~seg_mask] - self.n_segments
            nv = point[~seg_mask] - self.disc_center[di]
            # Explicit normalization: grazing hits land slightly off the
            # circle and dividing by the radius would leave |n| != 1.
            normal[~seg_mask] = nv / np.hypot(nv[:, 0], nv[:, 1])[:, None]
        return ent_best, t_best, point, normal, param_best


def first_hit(scene: Scene, origin, direction) -> Hit:
    """Nearest boundary hit of a single ray, with the specular outgoing direction."""
    o = np.asarray(origin, dtype=float).reshape(1, 2)
    d = np.asarray(direction, dtype=float).reshape(1, 2)
    ent, t, pt, n, param = scene.first_hit_batch(o, d)
    dv = d[0]
    nv = n[0]
    outgoing = dv - 2.0 * float(dv @ nv) * nv
    return Hit(entity=int(ent[0]), point=pt[0], distance=float(t[0]),
               surface_normal=nv, outgoing_direction=outgoing,
               param=float(param[0]))


# -- discretization ----------------------------------------------------------


@dataclass
class Discretization:
    """Boundary tiling into elements, with a fast hit -> element lookup.

    Element arrays are parallel: entity, cavity, behavior, opening, arc_length,
    param0 (arc-length or angle at element start), midpoint, normal and tangent
    at the midpoint.
    """

    scene: Scene
    target_length: float
    entity_offset: np.ndarray  # first element id of each entity
    entity_count: np.ndarray
    entity_step: np.ndarray  # element width in the entity's parameter
    entity: np.ndarray
    cavity: np.ndarray
    behavior: np.ndarray
    opening: np.ndarray
    arc_length: np.ndarray
    param0: np.ndarray
    midpoint: np.ndarray
    normal: np.ndarray
    tangent: np.ndarray

    @property
    def n_elements(self) -> int:
        return len(self.arc_length)

    def element_at(self, entity, param):
        """Element ids for hits given entity indices and entity parameters."""
        entity = np.asarray(entity, dtype=np.int64)
        param = np.asarray(param, dtype=float)
        idx = np.floor(param / self.entity_step[entity]).astype(np.int64)
        idx = np.clip(idx, 0, self.entity_count[entity] - 1)
        return self.entity_offset[entity] + idx

    def opening_elements(self, opening_id: str, cavity: Optional[str] = None):
        """Element ids tiling one opening (optionally one side of an aperture)."""
        oi = self.scene.opening_index(opening_id)
        mask = self.opening == oi
        if cavity is not None:
            mask &= self.cavity == self.scene.cavity_index(cavity)
        return np.nonzero(mask)[0]

    def point_at(self, element, frac):
        """World positions at fraction frac in [0, 1] along given elements."""
        element = np.asarray(element, dtype=np.int64)
        frac = np.asarray(frac, dtype=float)
        scene = self.scene
        ent = self.entity[element]
        par = self.param0[element] + frac * self.entity_step[ent]
        pts = np.empty(element.shape + (2,))
        nrm = np.empty_like(pts)
        seg = ent < scene.n_segments
        if np.any(seg):
            e = ent[seg]
            pts[seg] = scene.seg_p0[e] + par[seg][..., None] * scene.seg_dir[e]
            nrm[seg] = scene.seg_n[e]
        if np.any(~seg):
            di = ent[~seg] - scene.n_segments
            ang = par[~seg]
            radial = np.stack([np.cos(ang), np.sin(ang)], axis=-1)
            pts[~seg] = scene.disc_center[di] + scene.disc_radius[di][..., None] * radial
            nrm[~seg] = radial
        return pts, nrm


def discretize(scene: Scene, target_length: float) -> Discretization:
    """Tile the boundary into elements no longer than target_length.

    Every opening cross-section is tiled by a whole number of dedicated open
    elements; target_length must not exceed the smallest opening width.
    """
    if target_length <= 0:
        raise SceneError("target_length must be positive")
    if scene.openings:
        wmin = min(op.width for op in scene.openings)
        if target_length > wmin + 1e-12:
            raise SceneError(
                f"target_length {target_length} exceeds smallest opening width "
                f"{wmin}; each opening must own at least one element")

    behavior_of_kind = {KIND_WALL: BEHAVIOR_REFLECT, KIND_PORT: BEHAVIOR_PORT,
                        KIND_APERTURE: BEHAVIOR_APERTURE}
    offsets, counts, steps = [], [], []
    ent_l, cav_l, beh_l, open_l, len_l, par_l = [], [], [], [], [], []
    next_id = 0
    for ei in range(scene.n_entities):
        if ei < scene.n_segments:
            total = float(scene.seg_len[ei])
            kind = int(scene.seg_kind[ei])
            cav = int(scene.seg_cavity[ei])
            opn = int(scene.seg_opening[ei])
            n_el = max(1, math.ceil(total / target_length - 1e-12))
            step = total / n_el
            arc = step
        else:
            di = ei - scene.n_segments
            total = 2 * np.pi
            circumference = 2 * np.pi * float(scene.disc_radius[di])
            kind, cav, opn = KIND_WALL, int(scene.disc_cavity[di]), -1
            n_el = max(1, math.ceil(circumference / target_length - 1e-12),
                       math.ceil(2 * np.pi / MAX_DISC_ELEMENT_ANGLE))
            step = total / n_el
            arc = circumference / n_el
        offsets.append(next_id); counts.append(n_el); steps.append(step)
        for k in range(n_el):
            ent_l.append(ei); cav_l.append(cav)
            beh_l.append(behavior_of_kind[kind]); open_l.append(opn)
            len_l.append(arc); par_l.append(k * step)
        next_id += n_el

    d = Discretization(
        scene=scene, target_length=target_length,
        entity_offset=np.array(offsets, dtype=np.int64),
        entity_count=np.array(counts, dtype=np.int64),
        entity_step=np.array(steps, dtype=float),
        entity=np.array(ent_l, dtype=np.int64),
        cavity=np.array(cav_l, dtype=np.int64),
        behavior=np.array(beh_l, dtype=np.int64),
        opening=np.array(open_l, dtype=np.int64),
        arc_length=np.array(len_l, dtype=float),
        param0=np.array(par_l, dtype=float),
        midpoint=np.empty((next_id, 2)), normal=np.empty((next_id, 2)),
        tangent=np.empty((next_id, 2)))
    mids, nrms = d.point_at(np.arange(next_id), np.full(next_id, 0.5))
    d.midpoint[:] = mids
    d.normal[:] = nrms
    d.tangent[:] = _rot90(nrms)
    return d


# -- derived quantities ------------------------------------------------------


def analytic_perimeter(scene: Scene) -> float:
    """Total boundary arc length: wall faces, opening cross-sections, discs."""
    return (float(np.sum(scene.seg_len))
            + float(np.sum(2 * np.pi * scene.disc_radius)))


def pwb_dimensions(scene: Scene) -> dict:
    """Per-cavity perimeter and opening widths used by the power balance method.

    Returns {cavity_id: {"perimeter": l, "ports": {id: w}, "apertures": {id: w}}}.
    A cavity's perimeter includes its four walls (openings filled in) plus the
    circumferences of its discs.
    """
    out = {}
    for ci, cav in enumerate(scene.cavities):
        perimeter = 4.0 * cav.side
        perimeter += float(np.sum(
            2 * np.pi * scene.disc_radius[scene.disc_cavity == ci]))
        ports, apertures = {}, {}
        for oi, op in enumerate(scene.openings):
            owned = np.any((scene.seg_opening == oi) & (scene.seg_cavity == ci))
            if not owned:
                continue
            (ports if op.kind == "port" else apertures)[op.id] = op.width
        out[cav.id] = {"perimeter": perimeter, "ports": ports,
                       "apertures": apertures}
    return out


# -- configuration -----------------------------------------------------------


def build_scene(config: dict) -> Scene:
    """Build and validate a Scene from a JSON-style description.

    Schema: {"cavities": [{"id", "origin": [x, y], "side"}],
             "discs": [{"cavity", "center": [x, y], "radius"}],
             "openings": [{"id", "kind", "wall": {"cavity", "side"},
                           "center_offset", "width"}],
             "alpha": float}
    """
    try:
        cavities = [Cavity(id=str(c["id"]),
                           origin=Point2(float(c["origin"][0]), float(c["origin"][1])),
                           side=float(c.get("side", 1.0)))
                    for c in config["cavities"]]
        discs = [Disc(cavity=str(d["cavity"]),
                      center=Point2(float(d["center"][0]), float(d["center"][1])),
                      radius=float(d["radius"]))
                 for d in config.get("discs", [])]
        openings = [Opening(id=str(o["id"]), kind=str(o["kind"]),
                            cavity=str(o["wall"]["cavity"]),
                            wall_side=str(o["wall"]["side"]),
                            center_offset=float(o["center_offset"]),
                            width=float(o["width"]))
                    for o in config.get("openings", [])]
    except (KeyError, TypeError, IndexError) as exc:
        raise SceneError(f"malformed scene description: {exc}") from exc
    for cav in cavities:
        if cav.side <= 0:
            raise SceneError(f"cavity {cav.id}: side must be positive")
    for op in openings:
        if op.kind not in ("port", "aperture"):
            raise SceneError(f"opening {op.id}: kind must be 'port' or 'aperture'")
        if op.wall_side not in WALL_SIDES:
            raise SceneError(f"opening {op.id}: unknown wall side {op.wall_side!r}")
    return Scene(cavities, openings, discs, float(config.get("alpha", 0.0)))


def load_scene(path: str) -> Scene:
    with open(path) as fh:
        return build_scene(json.load(fh))
