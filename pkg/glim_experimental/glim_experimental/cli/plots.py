"""CSV tables and SVG plots of spectra.

SVG output is deterministic: element ids use a fixed hash salt and no date
is embedded.
"""
import csv
import io
import logging
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from glim.io import atomic_write_text
from glim.spectral.eigen import Histogram

logger = logging.getLogger(__name__)

SVG_HASH_SALT = "glim"


def _pyplot():
    # lazy import so that the library works without a display or matplotlib config
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = SVG_HASH_SALT
    plt.rcParams["figure.figsize"] = (6, 4.5)
    return plt


def _save_svg(fig, path: str):
    buffer = io.StringIO()
    fig.savefig(buffer, format="svg", metadata={"Date": None})
    atomic_write_text(path, buffer.getvalue())
    logger.info(f"Wrote {path}")


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]):
    atomic_write_text(path, csv_text(header, rows))


def scatter_rows(values: Sequence[complex]):
    values = np.asarray(values, dtype=complex)
    return [(repr(float(z.real)), repr(float(z.imag))) for z in values]


def write_scatter_csv(path: str, values: Sequence[complex]):
    """One (re, im) row per eigenvalue."""
    write_csv(path, ["re", "im"], scatter_rows(values))


def svg_histogram(
    path: str,
    histogram: Histogram,
    density: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    title: str = "",
):
    """Bar plot of an ESD histogram, with an optional limiting density overlay."""
    plt = _pyplot()
    fig, ax = plt.subplots()
    widths = np.diff(histogram.edges)
    heights = histogram.masses / np.where(widths > 0, widths, 1)
    ax.bar(histogram.edges[:-1], heights, width=widths, align="edge", color="0.7")
    if density is not None:
        xs = np.linspace(histogram.edges[0], histogram.edges[-1], 801)
        ax.plot(xs, density(xs), color="r")
    ax.set_xlabel("eigenvalue")
    ax.set_ylabel("density")
    if title:
        ax.set_title(title)
    _save_svg(fig, path)
    plt.close(fig)


def svg_scatter(
    path: str,
    values: Sequence[complex],
    radius: Optional[float] = None,
    title: str = "",
):
    """Complex eigenvalues in the plane; ``radius`` draws the circle |z| = radius."""
    plt = _pyplot()
    values = np.asarray(values, dtype=complex)
    fig, ax = plt.subplots()
    ax.scatter(values.real, values.imag, s=4, color="k")
    if radius is not None:
        theta = np.linspace(0, 2 * np.pi, 721)
        ax.plot(radius * np.cos(theta), radius * np.sin(theta), color="r")
    ax.set_aspect("equal")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    if title:
        ax.set_title(title)
    _save_svg(fig, path)
    plt.close(fig)
