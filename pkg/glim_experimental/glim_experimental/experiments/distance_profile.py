"""Typical graph distances in random Schreier graphs."""
import logging
import math
from typing import List, Sequence, Tuple

import numpy as np

from glim.errors import ConfigError
from glim.generators import schreier_graph
from glim.models.graph import bfs_distances
from glim.models.words import IDENTITY, Word, free_generators, parse_word
from glim.seeding import make_rng

from glim_experimental.experiments.base import (
    Experiment,
    Trial,
    at_least,
    at_most,
    median,
)
from glim_experimental.experiments.strong_convergence import make_rep
from glim_experimental.runner import run_experiment

logger = logging.getLogger(__name__)

GROWTH_RADIUS = 12
GROWTH_BUDGET = 10**6


def cayley_growth_rate(
    S: Sequence[Word], radius: int = GROWTH_RADIUS, budget: int = GROWTH_BUDGET
) -> Tuple[float, int]:
    """Estimate of lim ln|B_S(r)|/r from the sphere sizes of the Cayley ball.

    Grows the ball of F_d spanned by products of S until ``radius`` or until
    it holds ``budget`` elements.

    Returns:
        (ln(|S_r| / |S_{r-1}|), radius reached)
    """
    seen = {IDENTITY}
    sphere = [IDENTITY]
    sizes = [1]
    reached = 0
    for r in range(1, radius + 1):
        nxt = []
        for w in sphere:
            for s in S:
                u = w * s
                if u not in seen:
                    seen.add(u)
                    nxt.append(u)
        if not nxt:
            return 0.0, r - 1
        sizes.append(len(nxt))
        sphere = nxt
        reached = r
        if len(seen) > budget:
            break
    if reached < 2:
        return math.log(sizes[-1]) if sizes[-1] > 1 else 0.0, reached
    return math.log(sizes[-1] / sizes[-2]), reached


class DistanceProfile(Experiment):
    name = "distance-profile"
    description = (
        "Fraction of vertices at distance >= (1 + eps)·ln n / β_S from random "
        "sources in the Schreier graph of a permutation representation."
    )
    defaults = {
        "rank": 2,
        "n": 100000,
        "eps": 0.2,
        "sources": 20,
        "rep": "uniform",
        "S": None,
        "trials": 1,
    }
    tolerances = {"far_fraction": 0.05, "control_fraction": 0.5}

    def _generators(self, params) -> List[Word]:
        if params["S"] is None:
            return free_generators(params["rank"])
        return [parse_word(s) for s in params["S"]]

    def validate(self, params):
        if params["rep"] not in ("uniform", "cycle"):
            raise ConfigError(f"Unknown representation {params['rep']!r}")
        for w in self._generators(params):
            if w and max(abs(x) for x in w) > params["rank"]:
                raise ConfigError(
                    f"Word {w!r} uses a generator beyond rank {params['rank']}"
                )

    def prepare(self, params):
        S = self._generators(params)
        if params["S"] is None:
            beta = math.log(2 * params["rank"] - 1)
            return {"S": S, "beta": beta, "beta_source": "analytic"}
        beta, radius = cayley_growth_rate(S)
        if beta <= 0:
            raise ConfigError(
                "S spans a subgroup without exponential growth; ln n / β is undefined"
            )
        source = f"sphere growth at radius {radius}"
        return {"S": S, "beta": beta, "beta_source": source}

    def run_trial(self, params, context, spec):
        rng = make_rng(spec.seed)
        n = params["n"]
        rep = make_rep(params["rep"], n, params["rank"], rng)
        g = schreier_graph(rep, context["S"])
        count, component = g.connected_components()
        sources = rng.choice(n, size=min(params["sources"], n), replace=False)
        fractions = []
        thresholds = []
        for v in sources.tolist():
            members = component == component[v]
            size = int(members.sum())
            threshold = (1 + params["eps"]) * math.log(max(size, 2)) / context["beta"]
            distances = bfs_distances(g, v)[members]
            fractions.append(float(np.mean(distances >= threshold)))
            thresholds.append(threshold)
        notes = []
        if count > 1:
            notes.append(
                f"Schreier graph has {count} components; fractions are per component"
            )
        stats = {
            "fractions": fractions,
            "max_fraction": max(fractions),
            "min_fraction": min(fractions),
            "threshold": median(thresholds),
            "components": int(count),
        }
        return Trial(spec, stats, notes=notes)

    def evaluate(self, params, context, tolerances, trials):
        summary = {"beta": context["beta"], "beta_source": context["beta_source"]}
        if params["eps"] >= 0:
            worst = max(t.stats["max_fraction"] for t in trials)
            checks = [
                at_most("max far-vertex fraction", worst, tolerances["far_fraction"])
            ]
        else:
            worst = min(t.stats["min_fraction"] for t in trials)
            checks = [
                at_least(
                    "min far-vertex fraction (control)",
                    worst,
                    tolerances["control_fraction"],
                )
            ]
        summary["fraction"] = worst
        notes = []
        if params["rep"] == "cycle":
            notes.append(
                "cyclic representation: amenable action, "
                "the distance bound is not expected"
            )
        return checks, summary, notes


def exp_distance_profile(rep, S, eps, seed, **params):
    return run_experiment(
        DistanceProfile(), {"rep": rep, "S": S, "eps": eps, **params}, seed=seed
    )
