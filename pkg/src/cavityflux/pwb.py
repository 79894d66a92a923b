"""Power balance method for coupled reverberant cavities.

Each cavity is treated as an internally equilibrated reservoir; power leaves
through ports, apertures and wall absorption in proportion to the effective
cross-section of each channel.  Closed forms are provided for the one- and
two-cavity configurations, plus a general N-cavity linear solver that must
reproduce them.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .geometry import Scene, pwb_dimensions


class PwbError(ValueError):
    """Raised for inconsistent power-balance inputs."""


@dataclass(frozen=True)
class PwbInput:
    """Geometric inputs for the two-cavity balance.

    Power is normalized so the injected total is p_inj (default 1, into
    cavity 1).  sigma_tot_override replaces the geometry-derived total
    cross-sections when reproducing externally quoted constants.
    """

    l1: float
    l2: float
    w1: float
    w2: float
    wA: float
    alpha: float
    p_inj: float = 1.0
    sigma_tot_override: Optional[tuple] = None

    def __post_init__(self):
        for name in ("l1", "l2", "w1", "w2", "wA"):
            if getattr(self, name) <= 0:
                raise PwbError(f"{name} must be positive")
        if not 0.0 <= self.alpha <= 1.0:
            raise PwbError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.p_inj < 0:
            raise PwbError("p_inj must be non-negative")


@dataclass(frozen=True)
class PwbReport:
    sigma_wall: tuple  # per-cavity wall cross-section
    sigma_tot: tuple
    p_tot: tuple  # total power entering each cavity
    p_port: tuple  # power out of each cavity's exterior port
    p_back: tuple  # (power from cavity 2 into 1, from 1 into 2)
    p_wall: tuple  # wall-absorbed power per cavity


def sigma_wall(alpha: float, perimeter: float, opening_widths: Sequence[float]) -> float:
    """Effective wall-absorption cross-section of one cavity."""
    return alpha * (perimeter - sum(opening_widths))


def solve_two_cavity(inp: PwbInput) -> PwbReport:
    """Balance solution for two cavities coupled by one aperture.

    Injection goes into cavity 1 only; the per-cavity balance
    p_port + p_wall + p_back(out) = p_tot closes exactly.
    """
    sw1 = sigma_wall(inp.alpha, inp.l1, (inp.w1, inp.wA))
    sw2 = sigma_wall(inp.alpha, inp.l2, (inp.w2, inp.wA))
    st1 = sw1 + inp.w1 + inp.wA
    st2 = sw2 + inp.w2 + inp.wA
    if inp.sigma_tot_override is not None:
        st1, st2 = map(float, inp.sigma_tot_override)
        sw1 = st1 - inp.w1 - inp.wA
        sw2 = st2 - inp.w2 - inp.wA
    if st1 <= 0 or st2 <= 0:
        raise PwbError("total cross-sections must be positive")
    coupling = inp.wA ** 2 / (st1 * st2)
    if coupling >= 1.0:
        raise PwbError(
            f"singular balance: wA^2 = {inp.wA ** 2} >= sigma1*sigma2 = {st1 * st2}")

    p1_tot = inp.p_inj / (1.0 - coupling)
    p_21 = p1_tot * inp.wA / st1  # aperture power from cavity 1 into 2
    p2_tot = p_21
    p_12 = p2_tot * inp.wA / st2  # and back from 2 into 1
    report = PwbReport(
        sigma_wall=(sw1, sw2),
        sigma_tot=(st1, st2),
        p_tot=(p1_tot, p2_tot),
        p_port=(p1_tot * inp.w1 / st1, p2_tot * inp.w2 / st2),
        p_back=(p_12, p_21),
        p_wall=(p1_tot * sw1 / st1, p2_tot * sw2 / st2),
    )
    return report


def lossless_two_cavity_ratio(w1: float, w2: float, wA: float) -> float:
    """Fraction of injected power leaving cavity 1 through its own port at alpha = 0."""
    if min(w1, w2, wA) <= 0:
        raise PwbError("widths must be positive")
    return w1 * (w2 + wA) / (w1 * w2 + wA * (w1 + w2))


def single_cavity_ratio(w1: float, wA: float) -> float:
    """Port-1 share of injected power for one cavity with two openings, alpha = 0."""
    if min(w1, wA) <= 0:
        raise PwbError("widths must be positive")
    return w1 / (w1 + wA)


def solve_single_cavity(perimeter: float, widths: dict, alpha: float,
                        p_inj: float = 1.0) -> dict:
    """Per-opening exit powers for one cavity with any number of exterior openings."""
    total_w = sum(widths.values())
    sw = sigma_wall(alpha, perimeter, widths.values())
    st = sw + total_w
    if st <= 0:
        raise PwbError("total cross-section must be positive")
    out = {oid: p_inj * w / st for oid, w in widths.items()}
    out["wall"] = p_inj * sw / st
    return out


def solve_n_cavity(perimeters: Sequence[float], port_widths: Sequence[float],
                   aperture_widths: np.ndarray, alpha: float,
                   p_inj: Sequence[float]) -> dict:
    """General balance over N cavities coupled pairwise by apertures.

    aperture_widths is a symmetric (N, N) matrix of coupling widths (zero
    diagonal).  Returns per-cavity totals, port powers and wall powers plus
    the aperture flow matrix flow[i, j] = power from cavity i into j.
    """
    wA = np.asarray(aperture_widths, dtype=float)
    n = len(perimeters)
    if wA.shape != (n, n) or not np.allclose(wA, wA.T):
        raise PwbError("aperture_widths must be a symmetric (N, N) matrix")
    l = np.asarray(perimeters, dtype=float)
    w = np.asarray(port_widths, dtype=float)
    inj = np.asarray(p_inj, dtype=float)
    open_w = w + wA.sum(axis=1)
    s_wall = alpha * (l - open_w)
    s_tot = s_wall + open_w
    if np.any(s_tot <= 0):
        raise PwbError("total cross-sections must be positive")
    # p_tot_i = inj_i + sum_j wA_ij * p_tot_j / s_tot_j
    A = np.eye(n) - wA / s_tot[None, :]
    try:
        p_tot = np.linalg.solve(A, inj)
    except np.linalg.LinAlgError as exc:
        raise PwbError(f"singular balance system: {exc}") from exc
    if np.any(p_tot < -1e-12):
        raise PwbError("negative cavity power; balance system is unphysical")
    flow = wA * (p_tot / s_tot)[:, None]  # flow[i, j]: from i into j
    return {
        "sigma_wall": s_wall, "sigma_tot": s_tot, "p_tot": p_tot,
        "p_port": p_tot * w / s_tot, "p_wall": p_tot * s_wall / s_tot,
        "aperture_flow": flow,
    }


def report_for_scene(scene: Scene, p_inj_cavity: str = None) -> dict:
    """Opening-exit powers for a scene via the balance method.

    Works for one cavity with exterior openings or two cavities coupled by a
    single aperture.  Returns {opening_id: power} plus per-cavity "wall:<id>"
    entries, for unit injection into p_inj_cavity (default: first cavity).
    """
    dims = pwb_dimensions(scene)
    cavity_ids = [c.id for c in scene.cavities]
    inj_cavity = p_inj_cavity or cavity_ids[0]
    if len(cavity_ids) == 1:
        cid = cavity_ids[0]
        d = dims[cid]
        widths = dict(d["ports"])
        widths.update(d["apertures"])
        res = solve_single_cavity(d["perimeter"], widths, scene.alpha)
        wall = res.pop("wall")
        res[f"wall:{cid}"] = wall
        return res
    if len(cavity_ids) == 2:
        d1, d2 = dims[cavity_ids[0]], dims[cavity_ids[1]]
        apertures = d1["apertures"]
        if len(apertures) != 1 or len(d1["ports"]) != 1 or len(d2["ports"]) != 1:
            raise PwbError("two-cavity closed form needs one port per cavity "
                           "and one aperture")
        (p1_id, w1), = d1["ports"].items()
        (p2_id, w2), = d2["ports"].items()
        (pa_id, wa), = apertures.items()
        if inj_cavity != cavity_ids[0]:
            raise PwbError("injection must go into the first cavity")
        rep = solve_two_cavity(PwbInput(
            l1=d1["perimeter"], l2=d2["perimeter"],
            w1=w1, w2=w2, wA=wa, alpha=scene.alpha))
        return {
            p1_id: rep.p_port[0], p2_id: rep.p_port[1],
            pa_id: rep.p_back[1],
            f"wall:{cavity_ids[0]}": rep.p_wall[0],
            f"wall:{cavity_ids[1]}": rep.p_wall[1],
        }
    raise PwbError("scenes with more than two cavities need solve_n_cavity")
