"""CSV parsing and figure construction."""

import csv
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


class PlotDataError(ValueError):
    """The CSV does not satisfy the plotting contract."""


@dataclass
class PlotSpec:
    """What to plot: input CSV, output image, and styling knobs.

    The output format follows the file extension (.png or .svg).  The
    column named dashed_column is drawn dashed when present; every
    other value column gets a solid line.
    """

    input_csv: str
    output: str
    title: str = ""
    xlabel: str = "t"
    ylabel: str = "exponent"
    dashed_column: str = "limit"


def read_curves(path):
    """Parse a sweep CSV into (t, {column name: values}).

    The file must have a header containing `t` plus at least one value
    column, and at least one data row.  Column order is preserved.
    """
    with open(path, newline="") as fh:
        rows = [row for row in csv.reader(fh)
                if row and any(cell.strip() for cell in row)]
    if not rows:
        raise PlotDataError(f"{path}: empty CSV")
    header = [name.strip() for name in rows[0]]
    if "t" not in header:
        raise PlotDataError(
            f"{path}: missing column 't' (header: {', '.join(header)})")
    if len(header) < 2:
        raise PlotDataError(f"{path}: need at least one value column besides 't'")
    if len(rows) < 2:
        raise PlotDataError(f"{path}: no data rows")
    for k, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise PlotDataError(
                f"{path}: line {k} has {len(row)} cells, expected {len(header)}")
    try:
        data = np.array([[float(cell) for cell in row] for row in rows[1:]])
    except ValueError as exc:
        raise PlotDataError(f"{path}: non-numeric cell ({exc})") from None
    t_index = header.index("t")
    t = data[:, t_index]
    curves = {name: data[:, i] for i, name in enumerate(header) if i != t_index}
    return t, curves


def build_figure(spec):
    """Build the matplotlib figure for a spec without saving it."""
    t, curves = read_curves(spec.input_csv)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for name, values in curves.items():
        style = "--" if name == spec.dashed_column else "-"
        ax.plot(t, values, style, label=name)
    ax.set_xlabel(spec.xlabel)
    ax.set_ylabel(spec.ylabel)
    if spec.title:
        ax.set_title(spec.title)
    ax.legend()
    return fig


def render(spec):
    """Render the spec to its output image and return the output path."""
    fig = build_figure(spec)
    try:
        fig.savefig(spec.output)
    finally:
        plt.close(fig)
    return spec.output
