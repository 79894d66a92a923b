"""Stock scene descriptions and the reference point-source positions.

Disc centers are read off the reference figures by eye and are therefore
data, not geometry law: every preset is a plain config dict that callers may
copy and override before building.
"""

from __future__ import annotations

import copy

from .geometry import Scene, build_scene

# Seven reference point-source locations inside the unit cavity.
POINT_SOURCES = [
    (0.1, 0.9), (0.9, 0.1), (0.5, 0.4), (0.4, 0.1),
    (0.25, 0.2), (0.9, 0.9), (0.1, 0.5),
]

_FIG1A_DISCS_C1 = [(0.28, 0.55), (0.72, 0.55), (0.5, 0.22)]
_FIG1B_DISCS_C1 = [(0.22, 0.75), (0.45, 0.35), (0.75, 0.8)]
_DISCS_C2 = [(1.28, 0.55), (1.72, 0.55), (1.5, 0.22)]

_RADIUS = 0.1
_PORT_W = 0.1571
_APERTURE_W = 0.2


def _two_cavity(discs_c1) -> dict:
    return {
        "cavities": [
            {"id": "C1", "origin": [0.0, 0.0], "side": 1.0},
            {"id": "C2", "origin": [1.0, 0.0], "side": 1.0},
        ],
        "discs": (
            [{"cavity": "C1", "center": list(c), "radius": _RADIUS} for c in discs_c1]
            + [{"cavity": "C2", "center": list(c), "radius": _RADIUS} for c in _DISCS_C2]
        ),
        "openings": [
            {"id": "P1", "kind": "port",
             "wall": {"cavity": "C1", "side": "top"},
             "center_offset": 0.5, "width": _PORT_W},
            {"id": "P2", "kind": "port",
             "wall": {"cavity": "C2", "side": "top"},
             "center_offset": 0.5, "width": _PORT_W},
            {"id": "PA", "kind": "aperture",
             "wall": {"cavity": "C1", "side": "right"},
             "center_offset": 0.5, "width": _APERTURE_W},
        ],
        "alpha": 0.0,
    }


def _single_cavity(port_w: float, aperture_w: float) -> dict:
    # One cavity with two exterior openings: P1 on the top wall, PA on the
    # right wall (both drain to the outside).
    return {
        "cavities": [{"id": "C1", "origin": [0.0, 0.0], "side": 1.0}],
        "discs": [{"cavity": "C1", "center": list(c), "radius": _RADIUS}
                  for c in _FIG1A_DISCS_C1],
        "openings": [
            {"id": "P1", "kind": "port",
             "wall": {"cavity": "C1", "side": "top"},
             "center_offset": 0.5, "width": port_w},
            {"id": "PA", "kind": "port",
             "wall": {"cavity": "C1", "side": "right"},
             "center_offset": 0.5, "width": aperture_w},
        ],
        "alpha": 0.0,
    }


PRESETS = {
    "fig1a": _two_cavity(_FIG1A_DISCS_C1),
    "fig1b": _two_cavity(_FIG1B_DISCS_C1),
    "fig2": _single_cavity(_PORT_W, _APERTURE_W),
    "fig3": _single_cavity(_PORT_W / 10, _APERTURE_W / 10),
}


def preset_config(name: str) -> dict:
    """Deep copy of a stock scene description, safe to mutate."""
    try:
        return copy.deepcopy(PRESETS[name])
    except KeyError:
        raise KeyError(
            f"unknown preset {name!r}; available: {sorted(PRESETS)}") from None


def build_preset(name: str, alpha: float = 0.0) -> Scene:
    cfg = preset_config(name)
    cfg["alpha"] = alpha
    return build_scene(cfg)
