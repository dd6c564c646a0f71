"""Old and new eigenvalues of random n-lifts of a base graph."""
import logging

import numpy as np

from glim.errors import ConfigError
from glim.generators import n_lift, universal_cover_ball
from glim.io import read_graph
from glim.models.algebra import operator_norm_estimate
from glim.models.graph import MarkedGraph, build_graph
from glim.models.representations import (
    PermutationRep,
    cover_element,
    fiber_constant_basis,
)
from glim.spectral.eigen import eig_extreme_symmetric, spectral_moments
from glim.spectral.laws import multiset_distance
from glim.spectral.operators import adjacency

from glim_experimental.experiments.base import (
    Experiment,
    Trial,
    at_least,
    at_most,
    fraction_of,
)
from glim_experimental.runner import run_experiment

logger = logging.getLogger(__name__)

BASE_GRAPHS = {
    "theta": (2, [(0, 1), (0, 1), (0, 1)]),
    "bouquet": (1, [(0, 0), (0, 0)]),
    "triangle-loop": (3, [(0, 1), (1, 2), (2, 0), (0, 0)]),
}
MOMENT_RADIUS = 2


def load_base(base) -> MarkedGraph:
    """A named base graph, a graph file path, or {"n": ..., "edges": [...]}."""
    if isinstance(base, MarkedGraph):
        return base
    if isinstance(base, dict):
        return build_graph(int(base["n"]), [tuple(e) for e in base["edges"]])
    if base in BASE_GRAPHS:
        n, edges = BASE_GRAPHS[base]
        return build_graph(n, edges)
    try:
        return read_graph(base)
    except OSError as err:
        raise ConfigError(f"Unknown base graph {base!r}") from err


class CoverSpectrum(Experiment):
    name = "cover-spectrum"
    description = (
        "Uniform n-lifts of a base graph: fiber-constant eigenvalues equal the "
        "base spectrum, new eigenvalues stay within eps of the universal-cover "
        "spectral radius."
    )
    defaults = {"base": "theta", "n": 1000, "trials": 5, "eps": 0.2, "L": 8}
    tolerances = {"old": 1e-8, "pass_fraction": 0.8}

    def validate(self, params):
        base = load_base(params["base"])
        if base.is_marked:
            raise ConfigError("cover-spectrum expects an unmarked base graph")
        if not base.is_connected():
            raise ConfigError("cover-spectrum requires a connected base graph")
        if base.num_edges == 0:
            raise ConfigError("cover-spectrum requires a base graph with edges")

    def prepare(self, params):
        base = load_base(params["base"])
        estimate = operator_norm_estimate(cover_element(base), params["L"])
        base_spectrum = np.linalg.eigvalsh(base.adjacency_csr.toarray())
        K = 2 * MOMENT_RADIUS
        cover_moments = np.mean(
            [
                spectral_moments(universal_cover_ball(base, v, MOMENT_RADIUS), K=K)
                for v in range(base.vertex_count)
            ],
            axis=0,
        )
        return {
            "base": base,
            "base_spectrum": base_spectrum,
            "cover_norm": estimate.extrapolated,
            "estimate": estimate,
            "cover_moments": cover_moments.tolist(),
        }

    def run_trial(self, params, context, spec):
        base: MarkedGraph = context["base"]
        n = params["n"]
        lift = n_lift(base, PermutationRep.uniform(n, base.num_edges, spec.seed))
        a = adjacency(lift)
        fibers = fiber_constant_basis(base.vertex_count, n)
        old = np.linalg.eigvalsh((fibers.T @ a.matrix @ fibers).toarray())
        basis = fibers.toarray()
        top = eig_extreme_symmetric(a, 1, "top", basis)[0]
        bottom = eig_extreme_symmetric(a, 1, "bottom", basis)[0]
        extreme = float(max(top, -bottom))
        # one vertex per fiber; matches the cover unless a short cycle passes through
        moments = [
            spectral_moments(lift, v=b * n, K=2 * MOMENT_RADIUS)
            for b in range(base.vertex_count)
        ]
        moment_gap = np.max(np.abs(np.mean(moments, axis=0) - context["cover_moments"]))
        stats = {
            "old_gap": multiset_distance(old, context["base_spectrum"]),
            "new_top": float(top),
            "new_bottom": float(bottom),
            "excess": max(extreme - context["cover_norm"], 0.0),
            "moment_gap": float(moment_gap),
        }
        return Trial(spec, stats)

    def evaluate(self, params, context, tolerances, trials):
        checks = [
            at_most(
                "old eigenvalues = base spectrum",
                max(t.stats["old_gap"] for t in trials),
                tolerances["old"],
            ),
            at_least(
                "new eigenvalues within eps of the cover spectrum",
                fraction_of(t.stats["excess"] <= params["eps"] for t in trials),
                tolerances["pass_fraction"],
            ),
        ]
        summary = {
            "base_spectrum": context["base_spectrum"].tolist(),
            "cover_norm": context["cover_norm"],
            "norm_estimate": context["estimate"].to_dict(),
            "cover_moments": context["cover_moments"],
            "moment_gap": [t.stats["moment_gap"] for t in trials],
        }
        notes = ["the cover spectrum is bounded by its estimated norm [-ρ, ρ]"]
        return checks, summary, notes


def exp_cover_spectrum(base, n, trials, seed, **params):
    if isinstance(base, MarkedGraph):
        edges = [(u, v) for u, v, _ in base.edges()]
        base = {"n": base.vertex_count, "edges": edges}
    return run_experiment(
        CoverSpectrum(), {"base": base, "n": n, "trials": trials, **params}, seed=seed
    )
