"""Second eigenvalues of random regular graphs (adjacency and non-backtracking)."""
import logging
import math

import numpy as np

from glim.errors import ConfigError, EigensolverError
from glim.generators import random_regular
from glim.spectral.eigen import second_eigenvalue
from glim.spectral.identities import regular_nb_top_moduli
from glim.spectral.operators import adjacency

from glim_experimental.experiments.base import Experiment, Trial, at_least, fraction_of
from glim_experimental.runner import run_experiment

logger = logging.getLogger(__name__)


class Friedman(Experiment):
    name = "friedman"
    description = (
        "Adjacency λ2 after deflating constants against 2√(d-1) ± eps, and the "
        "second non-backtracking modulus against √(d-1) + eps."
    )
    defaults = {
        "n": 2000,
        "d": 4,
        "model": "pairing",
        "trials": 20,
        "eps": 0.1,
        "nb": True,
    }
    tolerances = {"pass_fraction": 0.95, "floor_fraction": 1.0}

    def validate(self, params):
        if params["d"] < 2:
            raise ConfigError("friedman requires d >= 2")
        if params["model"] == "pairing" and (params["n"] * params["d"]) % 2:
            raise ConfigError("pairing model requires n*d even")
        if params["model"] == "permutation" and params["d"] % 2:
            raise ConfigError("permutation model requires d even")

    def run_trial(self, params, context, spec):
        d, eps = params["d"], params["eps"]
        g = random_regular(params["n"], d, spec.seed, model=params["model"])
        ramanujan = 2 * math.sqrt(d - 1)
        try:
            lambda_2 = second_eigenvalue(adjacency(g))
        except EigensolverError as err:
            logger.warning(f"trial {spec.index}: {err}")
            stats = {"lambda_2": float("nan"), "upper": False, "floor": False}
            if params["nb"]:
                stats.update(
                    nb_lambda_1=float("nan"), nb_lambda_2=float("nan"), nb_upper=False
                )
            return Trial(spec, stats, notes=[f"eigensolver failed: {err}"])
        stats = {
            "lambda_2": lambda_2,
            "upper": lambda_2 <= ramanujan + eps,
            "floor": lambda_2 >= ramanujan - eps,
        }
        if params["nb"]:
            # B of a regular graph is determined by the adjacency spectrum
            nb_1, nb_2 = regular_nb_top_moduli(lambda_2, d)
            stats["nb_lambda_1"] = nb_1
            stats["nb_lambda_2"] = nb_2
            stats["nb_upper"] = bool(nb_2 <= math.sqrt(d - 1) + eps)
        return Trial(spec, stats)

    def evaluate(self, params, context, tolerances, trials):
        upper = fraction_of(t.stats["upper"] for t in trials)
        floor = fraction_of(t.stats["floor"] for t in trials)
        passing, floored = tolerances["pass_fraction"], tolerances["floor_fraction"]
        checks = [
            at_least("adjacency λ2 <= 2√(d-1) + eps", upper, passing),
            at_least("adjacency λ2 >= 2√(d-1) - eps", floor, floored),
        ]
        summary = {
            "ramanujan_bound": 2 * math.sqrt(params["d"] - 1),
            "lambda_2": [t.stats["lambda_2"] for t in trials],
            "upper_fraction": upper,
            "floor_fraction": floor,
        }
        if params["nb"]:
            nb = fraction_of(t.stats["nb_upper"] for t in trials)
            checks.append(at_least("nb |λ2| <= √(d-1) + eps", nb, passing))
            summary["nb_upper_fraction"] = nb
            summary["nb_lambda_2"] = [t.stats["nb_lambda_2"] for t in trials]
        notes = []
        if np.isclose(params["d"], 2):
            notes.append("d = 2: cycles sit exactly on the bound 2√(d-1) = 2")
        return checks, summary, notes


def exp_friedman(n, d, trials, eps, seed, **params):
    return run_experiment(
        Friedman(), {"n": n, "d": d, "trials": trials, "eps": eps, **params}, seed=seed
    )
