"""2D multi-cavity electromagnetic energy-flow simulator.

Three high-frequency methods over the same scenes:

- pwb: power balance closed forms (uniform-density reservoir model),
- raytrace: forward Monte-Carlo transport with per-reflection absorption,
- dea: boundary phase-space transfer operator and equilibrium/adjoint solves,

plus geometry (scenes, ray queries, discretization) and a sweep harness.
"""

from .geometry import (Scene, build_scene, discretize, first_hit, load_scene,
                       pwb_dimensions)
from .presets import POINT_SOURCES, build_preset, preset_config
from .raytrace import RtConfig, Source, simulate, trace_one

__all__ = [
    "Scene", "build_scene", "discretize", "first_hit", "load_scene",
    "pwb_dimensions", "POINT_SOURCES", "build_preset", "preset_config",
    "RtConfig", "Source", "simulate", "trace_one",
]

__version__ = "0.1.0"
