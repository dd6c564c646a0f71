import os
import logging
from collections import defaultdict

from glim.io import atomic_write_text
from glim.json import dumps
from glim_experimental.cli.plots import (
    svg_histogram,
    svg_scatter,
    write_csv,
    write_scatter_csv,
)
from glim_experimental.cli.simulation_accumulator import SimulationAccumulator
from glim_experimental.experiments.base import TrialAccumulator

logger = logging.getLogger(__name__)


class StatisticsAccumulator(TrialAccumulator):
    """Collects finished trials and their per-statistic values."""

    def __init__(self):
        self.trials = []
        self.durations = []
        self.values = defaultdict(list)

    def after(self, trial):
        self.trials.append(trial)
        self.durations.append(trial.duration)
        for key, value in trial.stats.items():
            if isinstance(value, (int, float)) and not isinstance(value, bool):
                self.values[key].append(value)

    def get_avg_duration(self):
        return sum(self.durations) / len(self.durations) if self.durations else 0.0

    def get_avg(self, key):
        values = self.values[key]
        return sum(values) / len(values) if values else float("nan")


class JsonDataAccumulator(TrialAccumulator):
    def __init__(self, output):
        self.output = output

    def after(self, trial):
        filepath = os.path.join(self.output, f"trial-{trial.spec.index:04d}.json")
        atomic_write_text(filepath, dumps(trial))


class CsvDataAccumulator(SimulationAccumulator):
    """Per-trial statistics as one CSV table, plus (re, im) scatters."""

    def __init__(self, output):
        self.output = output

    def before_all(self):
        self.rows = []
        self.columns = []

    def after(self, trial):
        row = {"index": trial.spec.index, "seed": trial.spec.seed, **trial.spec.params}
        for key, value in trial.stats.items():
            if isinstance(value, (bool, int, float, str)):
                row[key] = value
        for key in row:
            if key not in self.columns:
                self.columns.append(key)
        self.rows.append(row)
        if "scatter" in trial.data:
            path = os.path.join(self.output, f"scatter-{trial.spec.index:04d}.csv")
            write_scatter_csv(path, trial.data["scatter"])

    def after_all(self):
        rows = sorted(self.rows, key=lambda row: row["index"])
        path = os.path.join(self.output, "trials.csv")
        table = [[row.get(c, "") for c in self.columns] for row in rows]
        write_csv(path, self.columns, table)
        logger.info(f"Wrote {path}")


class PlotAccumulator(TrialAccumulator):
    """SVG plot of every trial spectrum (histogram) or complex scatter.

    Args:
        density: limiting density drawn over histograms.
        radius: circle drawn on scatters.
    """

    def __init__(self, output, density=None, radius=None):
        self.output = output
        self.density = density
        self.radius = radius

    def after(self, trial):
        index = trial.spec.index
        title = f"trial {index}"
        spectrum = trial.data.get("spectrum")
        if spectrum is not None and spectrum.histogram is not None:
            path = os.path.join(self.output, f"histogram-{index:04d}.svg")
            svg_histogram(path, spectrum.histogram, self.density, title=title)
        if "scatter" in trial.data:
            path = os.path.join(self.output, f"scatter-{index:04d}.svg")
            svg_scatter(path, trial.data["scatter"], self.radius, title=title)
