"""Figure generation for cbce benchmark traces."""

from .render import PlotSpec, SchemaError, load_trace, moving_mean, render, smoothed_curves

__all__ = [
    "PlotSpec",
    "SchemaError",
    "load_trace",
    "moving_mean",
    "render",
    "smoothed_curves",
]
