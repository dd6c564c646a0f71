"""Benjamini–Schramm convergence of sampled graphs to their local limit."""
import logging
from typing import List

import numpy as np

from glim.errors import ConfigError
from glim.generators import galton_watson_ball_law, schreier_graph
from glim.models.balls import (
    canonical_class,
    neighborhood_distribution,
    point_mass,
    regular_tree_ball,
    total_variation,
)
from glim.models.graph import count_short_cycles
from glim.models.representations import PermutationRep, character_fractions
from glim.models.words import free_generators
from glim.seeding import make_rng

from glim_experimental.experiments.base import (
    Experiment,
    Trial,
    TrialSpec,
    at_most,
    median,
)
from glim_experimental.experiments.ensembles import (
    ENSEMBLES,
    degree_of,
    sample_ensemble,
)
from glim_experimental.runner import run_experiment

logger = logging.getLogger(__name__)

LIMITS = ("tree", "poisson-gw", "character")
SCHREIER_ENSEMBLES = ("schreier", "cycle-schreier")


def max_fixed_fraction(rep: PermutationRep, word_length: int) -> float:
    return max((f for _, f in character_fractions(rep, word_length)), default=0.0)


class BsConvergence(Experiment):
    name = "bs-convergence"
    description = (
        "TV distance between the radius-r neighborhood distribution of sampled "
        "graphs and the law of the limit ball (T_d, Poisson GW); fixed-point "
        "fractions of short words for Schreier graphs."
    )
    defaults = {
        "ensemble": "regular",
        "n_list": [1000, 10000],
        "d": 4,
        "rank": 2,
        "model": "pairing",
        "r": 2,
        "limit": "tree",
        "samples": 100000,
        "word_length": 3,
        "trials": 1,
    }
    tolerances = {"tv": 0.02, "gw_tv": 0.05, "fixed_points": 0.01}

    def validate(self, params):
        if params["limit"] not in LIMITS:
            raise ConfigError(
                f"Unknown limit {params['limit']!r}; choose from {list(LIMITS)}"
            )
        if params["ensemble"] not in ENSEMBLES:
            raise ConfigError(f"Unknown ensemble {params['ensemble']!r}")
        schreier = params["ensemble"] in SCHREIER_ENSEMBLES
        if params["limit"] == "character" and not schreier:
            raise ConfigError("character limit requires a Schreier ensemble")
        if params["limit"] == "tree" and params["ensemble"] in ("er", "percolation"):
            raise ConfigError(
                f"{params['ensemble']} graphs do not converge to a regular tree"
            )

    def prepare(self, params):
        if params["limit"] == "poisson-gw":
            return {}
        degree = int(degree_of(params["ensemble"], params))
        tree = canonical_class(regular_tree_ball(degree, params["r"]))
        return {"tree_class": tree, "tree_degree": degree}

    def plan(self, params):
        trials = int(params["trials"])
        return [{"n": int(n)} for n in params["n_list"] for _ in range(trials)]

    def run_trial(self, params, context, spec: TrialSpec) -> Trial:
        rng = make_rng(spec.seed)
        n = spec.params["n"]
        name = params["ensemble"]
        notes: List[str] = []
        stats = {"n": n}
        if name == "schreier":
            rep = PermutationRep.uniform(n, int(params["rank"]), rng)
            stats["max_fixed_fraction"] = max_fixed_fraction(rep, params["word_length"])
            g = schreier_graph(rep, free_generators(rep.d))
        else:
            g = sample_ensemble(name, n, params, rng)
            if name == "cycle-schreier":
                rep = PermutationRep.cycle(n, int(params["rank"]))
                stats["max_fixed_fraction"] = max_fixed_fraction(
                    rep, params["word_length"]
                )
        # the limits are unlabeled; generator labels are dropped for the census
        law = neighborhood_distribution(g.forget_labels(), params["r"])
        if params["limit"] == "poisson-gw":
            limit = galton_watson_ball_law(
                float(params["d"]), params["r"], params["samples"], rng
            )
        else:
            limit = point_mass(context["tree_class"], params["r"])
        stats["tv"] = total_variation(law, limit)
        stats["classes"] = len(law.weights)
        stats["exact"] = law.exact
        stats.update(count_short_cycles(g))
        if not law.exact:
            notes.append("some ball classes use refinement-hash codes")
        logger.debug(f"n={n}: tv={stats['tv']:.4f}")
        return Trial(spec, stats, notes=notes)

    def evaluate(self, params, context, tolerances, trials):
        largest = max(int(n) for n in params["n_list"])
        by_n = {}
        for trial in trials:
            by_n.setdefault(trial.stats["n"], []).append(trial)
        medians = {
            str(n): median(t.stats["tv"] for t in ts) for n, ts in sorted(by_n.items())
        }
        summary = {"median_tv": medians}
        final = by_n[largest]
        final_tv = median(t.stats["tv"] for t in final)
        tv_key = "gw_tv" if params["limit"] == "poisson-gw" else "tv"
        checks = [at_most(f"tv at n={largest}", final_tv, tolerances[tv_key])]
        if params["ensemble"] in SCHREIER_ENSEMBLES:
            fixed = median(t.stats["max_fixed_fraction"] for t in final)
            summary["median_max_fixed_fraction"] = fixed
            checks.append(
                at_most(
                    f"fixed-point fraction |w| <= {params['word_length']}"
                    f" at n={largest}",
                    fixed,
                    tolerances["fixed_points"],
                    required=(
                        params["ensemble"] == "schreier"
                        or params["limit"] == "character"
                    ),
                )
            )
        notes = []
        sizes = sorted(by_n)
        trend = [medians[str(n)] for n in sizes]
        if len(sizes) > 1 and not all(np.diff(trend) <= 0):
            notes.append("TV distance is not monotone in n over this grid")
        return checks, summary, notes


def exp_bs_convergence(ensemble, n_list, r, limit_spec, seed, **params):
    return run_experiment(
        BsConvergence(),
        {
            "ensemble": ensemble,
            "n_list": list(n_list),
            "r": r,
            "limit": limit_spec,
            **params,
        },
        seed=seed,
    )
