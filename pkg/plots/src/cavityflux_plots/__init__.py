"""Rendering of cavityflux sweep and heatmap CSVs into publication figures."""

from .model import PlotSpec, SchemaError, read_heatmap, read_sweep
from .figures import build_figure, render

__all__ = ["PlotSpec", "SchemaError", "read_sweep", "read_heatmap",
           "build_figure", "render"]

__version__ = "0.1.0"
