"""Adjacency ESD of random regular graphs against the Kesten–McKay law."""
import numpy as np

from glim.errors import ConfigError
from glim.generators import random_regular
from glim.spectral.eigen import eig_dense_symmetric, esd_moments
from glim.spectral.laws import (
    kesten_mckay_cdf_vector,
    kesten_mckay_moments,
    ks_distance,
)
from glim.spectral.operators import adjacency

from glim_experimental.experiments.base import Experiment, Trial, at_most, median
from glim_experimental.runner import run_experiment


class KestenMcKay(Experiment):
    name = "kesten-mckay"
    description = (
        "Kolmogorov-Smirnov distance between the adjacency ESD of a random "
        "d-regular graph and the Kesten-McKay law, plus moments k <= K."
    )
    defaults = {
        "n": 4000,
        "d": 4,
        "model": "pairing",
        "moments": 6,
        "bins": 100,
        "trials": 1,
    }
    tolerances = {"ks": 0.02, "moment": 0.02}

    def validate(self, params):
        if (params["n"] * params["d"]) % 2 and params["model"] == "pairing":
            raise ConfigError("pairing model requires n*d even")
        if params["d"] < 2:
            raise ConfigError("Kesten-McKay law requires d >= 2")

    def prepare(self, params):
        return {"tree_moments": kesten_mckay_moments(params["d"], params["moments"])}

    def run_trial(self, params, context, spec):
        g = random_regular(params["n"], params["d"], spec.seed, model=params["model"])
        report = eig_dense_symmetric(
            adjacency(g), bins=params["bins"], moments=params["moments"]
        )
        values = report.eigenvalues
        ks = ks_distance(values, kesten_mckay_cdf_vector(params["d"]))
        moments = esd_moments(values, params["moments"])
        errors = []
        for k, (m, t) in enumerate(zip(moments, context["tree_moments"])):
            errors.append(abs(m - t) / t if t else abs(m))
        stats = {
            "ks": ks,
            "moments": moments,
            "moment_errors": errors,
            "lambda_1": float(values[-1]),
            "lambda_min": float(values[0]),
        }
        return Trial(spec, stats, data={"spectrum": report})

    def evaluate(self, params, context, tolerances, trials):
        ks = median(t.stats["ks"] for t in trials)
        checks = [at_most("ks distance", ks, tolerances["ks"])]
        for k in range(1, params["moments"] + 1):
            worst = max(t.stats["moment_errors"][k] for t in trials)
            checks.append(
                at_most(
                    f"moment k={k} error",
                    worst,
                    tolerances["moment"],
                    required=k == 2,
                    detail="relative" if context["tree_moments"][k] else "absolute",
                )
            )
        summary = {"median_ks": ks, "tree_moments": context["tree_moments"]}
        return checks, summary, []


def exp_kesten_mckay(n, d, seed, **params):
    return run_experiment(KestenMcKay(), {"n": n, "d": d, **params}, seed=seed)
