"""Kernel dimension of Erdős–Rényi adjacency against the Galton–Watson atom at 0."""
import logging

import numpy as np

from glim.errors import ConfigError
from glim.generators import erdos_renyi
from glim.spectral.eigen import EXACT_RANK_LIMIT, nullity
from glim.spectral.laws import gw_kernel_mass

from glim_experimental.experiments.base import (
    Experiment,
    Trial,
    at_least,
    at_most,
    median,
)
from glim_experimental.runner import run_experiment

logger = logging.getLogger(__name__)


class GwKernel(Experiment):
    """``n_list`` runs ``trials`` graphs per size; otherwise ``n`` alone is used."""

    name = "gw-kernel"
    description = (
        "Nullity fraction of the ER(n, d/n) adjacency matrix compared to the "
        "atom at 0 of the Poisson(d) Galton-Watson tree, optionally along n."
    )
    defaults = {
        "n": 4000,
        "n_list": None,
        "d": 4.0,
        "trials": 5,
        "exact_limit": EXACT_RANK_LIMIT,
    }
    tolerances = {"kernel": 0.01}

    def sizes(self, params):
        return sorted(int(n) for n in (params["n_list"] or [params["n"]]))

    def validate(self, params):
        if params["d"] <= 0:
            raise ConfigError("gw-kernel requires d > 0")
        if any(n <= 0 for n in self.sizes(params)):
            raise ConfigError("gw-kernel requires positive sizes")

    def prepare(self, params):
        q, mass = gw_kernel_mass(float(params["d"]))
        return {"q": q, "mass": mass}

    def plan(self, params):
        return [
            {"n": n, "repeat": r}
            for r in range(int(params["trials"]))
            for n in self.sizes(params)
        ]

    def run_trial(self, params, context, spec):
        n = spec.params["n"]
        g = erdos_renyi(n, float(params["d"]), spec.seed)
        null = nullity(g, exact_limit=params["exact_limit"])
        fraction = null / n
        stats = {
            "n": n,
            "nullity": null,
            "fraction": fraction,
            "error": abs(fraction - context["mass"]),
        }
        return Trial(spec, stats)

    def evaluate(self, params, context, tolerances, trials):
        sizes = self.sizes(params)
        errors = {
            n: median(t.stats["error"] for t in trials if t.stats["n"] == n)
            for n in sizes
        }
        largest = sizes[-1]
        fractions = [t.stats["fraction"] for t in trials]
        checks = [
            at_most(
                f"median |nullity/n - mass| at n={largest}",
                errors[largest],
                tolerances["kernel"],
            ),
            at_least("nullity fraction >= 0", min(fractions), 0.0),
            at_most("nullity fraction <= 1", max(fractions), 1.0),
        ]
        if len(sizes) > 1:
            steps = np.diff([errors[n] for n in sizes])
            checks.append(
                at_most("sizes where the median error grows", int(np.sum(steps > 0)), 0)
            )
        summary = {
            **context,
            "median_fraction": median(
                t.stats["fraction"] for t in trials if t.stats["n"] == largest
            ),
            "median_error": errors[largest],
            "median_error_by_n": {str(n): errors[n] for n in sizes},
        }
        return checks, summary, []


def exp_gw_kernel(n, d, trials, seed, **params):
    """``n`` may be a single size or a list of sizes."""
    if isinstance(n, (list, tuple)):
        params["n_list"] = list(n)
        n = max(n)
    return run_experiment(
        GwKernel(), {"n": n, "d": d, "trials": trials, **params}, seed=seed
    )
