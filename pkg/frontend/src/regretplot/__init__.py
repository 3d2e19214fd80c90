from .plot import (
    CSV_HEADER,
    PlotSpec,
    RunSeries,
    SchemaError,
    build_figure,
    load_directory,
    load_run,
    mean_curve,
    render,
    time_axis_curves,
)

__all__ = [
    "CSV_HEADER",
    "PlotSpec",
    "RunSeries",
    "SchemaError",
    "build_figure",
    "load_directory",
    "load_run",
    "mean_curve",
    "render",
    "time_axis_curves",
]
