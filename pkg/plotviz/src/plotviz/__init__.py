"""Turn exponent-sweep CSV files into line figures.

The expected input is a CSV with a `t` column followed by one or more
value columns, as written by `projlyap figure1` or any tool using the
same schema.  Each value column becomes one curve; the column named by
the plot spec's `dashed_column` (default "limit") is drawn dashed.
"""

from .core import PlotSpec, PlotDataError, read_curves, build_figure, render

__version__ = "0.1.0"

__all__ = [
    "PlotSpec",
    "PlotDataError",
    "read_curves",
    "build_figure",
    "render",
]
