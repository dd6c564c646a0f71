"""Named random graph ensembles shared by the presets and ``glim gen``."""
from typing import Any, Mapping

from glim.errors import ConfigError
from glim.generators import (
    erdos_renyi,
    random_regular,
    schreier_graph,
    zd_box_percolation,
)
from glim.models.graph import MarkedGraph
from glim.models.representations import PermutationRep
from glim.models.words import free_generators
from glim.seeding import SeedLike, make_rng

ENSEMBLES = {
    "regular": "Uniform d-regular multigraph (pairing or permutation model).",
    "er": "Erdős–Rényi G(n, d/n).",
    "schreier": "Schreier graph of `rank` uniform permutations and their inverses.",
    "cycle-schreier": "Schreier graph where every generator acts as the n-cycle.",
    "percolation": "Bond percolation on the box [-n, n]^dim with parameter p.",
}

STOCHASTIC = {"regular", "er", "schreier", "percolation"}

# generator counts used when `rank` is not given
DEFAULT_RANK = {"schreier": 2, "cycle-schreier": 1}


def rank_of(name: str, params: Mapping[str, Any]) -> int:
    return int(params.get("rank", DEFAULT_RANK[name]))


def degree_of(name: str, params: Mapping[str, Any]) -> float:
    """Mean degree of the ensemble (of its limit for "er")."""
    if name in ("schreier", "cycle-schreier"):
        return 2 * rank_of(name, params)
    if name == "percolation":
        return 2 * int(params.get("dim", 2)) * float(params.get("p", 0.5))
    return params.get("d", 4)


def sample_ensemble(
    name: str, n: int, params: Mapping[str, Any], seed: SeedLike
) -> MarkedGraph:
    if name not in ENSEMBLES:
        raise ConfigError(f"Unknown ensemble {name!r}; choose from {sorted(ENSEMBLES)}")
    if name == "cycle-schreier":
        rep = PermutationRep.cycle(n, rank_of(name, params))
        return schreier_graph(rep, free_generators(rep.d))
    rng = make_rng(seed)
    if name == "regular":
        model = params.get("model", "pairing")
        return random_regular(n, int(params.get("d", 4)), rng, model=model)
    if name == "er":
        return erdos_renyi(n, float(params.get("d", 4)), rng)
    if name == "schreier":
        rank = rank_of(name, params)
        rep = PermutationRep.uniform(n, rank, rng)
        return schreier_graph(rep, free_generators(rank))
    dim, p = int(params.get("dim", 2)), float(params.get("p", 0.5))
    return zd_box_percolation(dim, n, p, rng)
