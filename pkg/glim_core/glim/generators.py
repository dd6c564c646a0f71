"""Samplers for the random graph ensembles.

All samplers are pure functions of their parameters and ``seed``.
"""
import logging
from collections import Counter
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from glim.errors import BudgetExceededError
from glim.models.balls import (
    NeighborhoodDistribution,
    RootedBall,
    canonical_class,
    tree_ball,
)
from glim.models.graph import MarkedGraph, build_graph
from glim.models.representations import PermutationRep
from glim.models.words import free_generators, parse_word
from glim.seeding import SeedLike, make_rng

logger = logging.getLogger(__name__)

REGULAR_MODELS = ("pairing", "permutation")
MAX_VERTICES = 10**7
MAX_TREE_VERTICES = 10**6


# ===== Regular graphs
def random_regular(
    n: int,
    d: int,
    seed: SeedLike,
    model: str = "pairing",
    simple: bool = False,
    max_tries: int = 1000,
) -> MarkedGraph:
    """d-regular multigraph on n vertices.

    Args:
        model: "pairing" draws a uniform perfect matching of the n·d
            half-edges; "permutation" is the Schreier graph of d/2 uniform
            permutations and their inverses.
        simple: reject pairings with loops or multi-edges (pairing model).
    """
    if model not in REGULAR_MODELS:
        raise ValueError(f"Invalid regular model {model!r}")
    if n < 1 or d < 0:
        raise ValueError(f"Invalid regular graph parameters n={n}, d={d}")
    rng = make_rng(seed)
    if model == "permutation":
        if d % 2:
            raise ValueError("permutation model requires d even")
        rep = PermutationRep.uniform(n, d // 2, rng)
        return schreier_graph(rep, free_generators(d // 2))

    if (n * d) % 2:
        raise ValueError("pairing model requires n*d even")
    points = np.repeat(np.arange(n, dtype=np.int64), d)
    for attempt in range(1, max_tries + 1):
        matched = points[rng.permutation(points.size)].reshape(-1, 2)
        if not simple or _is_simple(matched):
            if attempt > 1:
                logger.debug(f"Simple pairing found after {attempt} attempts")
            return build_graph(n, matched.tolist())
    raise ValueError(f"No simple pairing found in {max_tries} attempts")


def _is_simple(pairs: np.ndarray) -> bool:
    if np.any(pairs[:, 0] == pairs[:, 1]):
        return False
    ordered = np.sort(pairs, axis=1)
    return np.unique(ordered, axis=0).shape[0] == ordered.shape[0]


# ===== Erdős–Rényi
def _triangle_pairs(indices: np.ndarray, n: int) -> np.ndarray:
    """Decodes k in [0, n(n-1)/2) into the k-th pair (i, j), i < j, row-major."""
    k = indices.astype(np.float64)
    i = n - 2 - np.floor(np.sqrt(-8 * k + 4 * n * (n - 1) - 7) / 2.0 - 0.5)
    i = i.astype(np.int64)
    j = indices + i + 1 - n * (n - 1) // 2 + (n - i) * ((n - i) - 1) // 2
    return np.stack([i, j], axis=1)


def erdos_renyi(n: int, d: float, seed: SeedLike) -> MarkedGraph:
    """G(n, min(1, d/n)): every pair {u, v} present independently."""
    if d <= 0:
        raise ValueError(f"Invalid mean degree {d}")
    rng = make_rng(seed)
    pairs_total = n * (n - 1) // 2
    p = min(1.0, d / n)
    count = int(rng.binomial(pairs_total, p)) if pairs_total else 0
    if count:
        chosen = np.sort(rng.choice(pairs_total, size=count, replace=False))
    else:
        chosen = np.empty(0, np.int64)
    return build_graph(n, _triangle_pairs(chosen, n).tolist())


# ===== Z^d percolation
MarkSampler = Callable[[np.random.Generator, int], np.ndarray]


def zd_box_percolation(
    dim: int,
    n: int,
    p: float,
    seed: SeedLike,
    mark_sampler: Optional[MarkSampler] = None,
    max_vertices: int = MAX_VERTICES,
) -> MarkedGraph:
    """Bond percolation on the box [-n, n]^dim.

    Vertex ids are row-major over the box coordinates shifted by n.
    ``mark_sampler(rng, size)`` draws i.i.d. symmetric marks for open edges.
    """
    if dim < 1 or n < 0:
        raise ValueError(f"Invalid box parameters dim={dim}, n={n}")
    if not 0 <= p <= 1:
        raise ValueError(f"Invalid percolation parameter p={p}")
    side = 2 * n + 1
    size = side**dim
    if size > max_vertices:
        raise BudgetExceededError(
            f"Box with {size} vertices exceeds budget {max_vertices}",
            max_vertices,
            size,
        )
    rng = make_rng(seed)
    ids = np.arange(size, dtype=np.int64).reshape((side,) * dim)
    tails, heads = [], []
    for axis in range(dim):
        lower = [slice(None)] * dim
        upper = [slice(None)] * dim
        lower[axis] = slice(0, side - 1)
        upper[axis] = slice(1, side)
        tails.append(ids[tuple(lower)].ravel())
        heads.append(ids[tuple(upper)].ravel())
    tails = np.concatenate(tails) if tails else np.empty(0, np.int64)
    heads = np.concatenate(heads) if heads else np.empty(0, np.int64)
    is_open = rng.random(tails.size) < p
    tails, heads = tails[is_open], heads[is_open]
    if mark_sampler is None:
        return build_graph(size, np.stack([tails, heads], axis=1).tolist())
    marks = np.asarray(mark_sampler(rng, tails.size))
    return build_graph(size, list(zip(tails.tolist(), heads.tolist(), marks.tolist())))


def box_center(dim: int, n: int) -> int:
    side = 2 * n + 1
    return int(np.ravel_multi_index((n,) * dim, (side,) * dim))


# ===== Galton–Watson
def galton_watson_poisson(
    d: float, depth: int, seed: SeedLike, max_vertices: int = MAX_TREE_VERTICES
) -> RootedBall:
    """Poisson(d) Galton–Watson tree truncated at ``depth``.

    Vertices at the truncation depth are flagged as boundary.
    """
    if d <= 0 or depth < 0:
        raise ValueError(f"Invalid Galton-Watson parameters d={d}, depth={depth}")
    rng = make_rng(seed)
    edges: List[Tuple[int, int]] = []
    frontier = [0]
    size = 1
    for _ in range(depth):
        if not frontier:
            break
        offspring = rng.poisson(d, size=len(frontier))
        next_frontier = []
        for parent, count in zip(frontier, offspring.tolist()):
            for _ in range(count):
                edges.append((parent, size))
                next_frontier.append(size)
                size += 1
        if size > max_vertices:
            raise BudgetExceededError(
                f"Galton-Watson tree exceeds {max_vertices} vertices",
                max_vertices,
                size,
            )
        frontier = next_frontier
    return tree_ball(size, edges, depth)


def galton_watson_ball_law(
    d: float, r: int, samples: int, seed: SeedLike
) -> NeighborhoodDistribution:
    """Monte Carlo law of the radius-r ball of the Poisson(d) GW tree."""
    rng = make_rng(seed)
    counts = Counter()
    for _ in range(samples):
        counts[canonical_class(galton_watson_poisson(d, r, rng))] += 1
    weights = {c: k / samples for c, k in counts.items()}
    return NeighborhoodDistribution(r, weights, dict(counts), samples)


def gw_extinction_probability(d: float) -> float:
    """Smallest root in [0, 1] of q = exp(d (q - 1))."""
    if d <= 1:
        return 1.0

    def excess(q):
        return np.exp(d * (q - 1.0)) - q

    delta = 0.5
    while excess(1.0 - delta) >= 0:
        delta /= 2
        if delta < 1e-15:
            return 1.0
    return float(optimize.brentq(excess, 0.0, 1.0 - delta, xtol=1e-14))


# ===== Schreier graphs and covers
def schreier_graph(rep: PermutationRep, S: Sequence) -> MarkedGraph:
    """Sch(F_d, S, ρ): an edge x -> ρ(s)(x) marked s for every s ∈ S and x.

    S must be closed under inversion (with multiplicity); the orientations
    (x, s) and (ρ(s)x, s⁻¹) form one edge. An identity element contributes a
    loop at every vertex.
    """
    words = [parse_word(s) for s in S]
    multiplicity = Counter(words)
    for w, count in multiplicity.items():
        if multiplicity.get(w.inverse(), 0) != count:
            raise ValueError(f"S is not symmetric: {w!r} without matching inverse")
    edges = []
    labels = []
    seen = set()
    for w in words:
        if w in seen:
            continue
        seen.add(w)
        inverse = w.inverse()
        seen.add(inverse)
        image = rep.word_permutation(w)
        for _ in range(multiplicity[w]):
            edges.extend(zip(range(rep.n), image.tolist()))
            labels.extend([(w, inverse)] * rep.n)
    return build_graph(rep.n, edges, labels=labels)


def n_lift(base: MarkedGraph, rep: PermutationRep) -> MarkedGraph:
    """The n-cover of ``base`` encoded by one permutation per unoriented edge.

    Base edges are taken in half-edge id order of their forward orientation;
    edge (e, x) joins (e₋, x) to (e₊, σ_e(x)) and vertex (v, x) has id v·n + x.
    Every lifted half-edge carries the mark and label of its projection, so
    marks without a symmetry are kept as well.
    """
    forward = np.flatnonzero(base.partner > np.arange(base.num_half_edges))
    if rep.d != forward.size:
        raise ValueError(
            f"Permutation count mismatch: {rep.d} permutations for {forward.size} edges"
        )
    n = rep.n
    xs = np.arange(n)
    edges = []
    labels = [] if base.labels is not None else None
    for k, e in enumerate(forward.tolist()):
        u, v = int(base.source[e]), int(base.target[e])
        tails = u * n + xs
        heads = v * n + rep.perms[k]
        edges.extend(zip(tails.tolist(), heads.tolist()))
        if labels is not None:
            labels.extend([(base.labels[e], base.labels[int(base.partner[e])])] * n)
    lift = build_graph(base.vertex_count * n, edges, labels=labels)
    if base.marks is None:
        return lift
    # edge k of the lift is half-edges 2k (forward) and 2k + 1 (reverse)
    marks = np.empty(lift.num_half_edges, dtype=np.complex128)
    marks[0::2] = np.repeat(base.marks[forward], n)
    marks[1::2] = np.repeat(base.marks[base.partner[forward]], n)
    return MarkedGraph(lift.vertex_count, lift.source, lift.partner, marks, lift.labels)


def lift_projection(base: MarkedGraph, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Covering map of ``n_lift(base, rep)``.

    Returns:
        (vertex projection, half-edge projection)
    """
    forward = np.flatnonzero(base.partner > np.arange(base.num_half_edges))
    vertices = np.repeat(np.arange(base.vertex_count), n)
    edge_index = np.repeat(forward, n)
    half_edges = np.empty(2 * edge_index.size, dtype=np.int64)
    half_edges[0::2] = edge_index
    half_edges[1::2] = base.partner[edge_index]
    return vertices, half_edges


def universal_cover_ball(
    base: MarkedGraph, base_vertex: int, r: int, max_vertices: int = MAX_TREE_VERTICES
) -> RootedBall:
    """Ball of radius r in the universal covering tree of a connected base.

    Vertices are non-backtracking paths from ``base_vertex``; ``vertex_map``
    holds the projection of each vertex to the base.
    """
    if not base.is_connected():
        raise ValueError("universal_cover_ball requires a connected base graph")
    if not 0 <= base_vertex < base.vertex_count:
        raise ValueError(f"Invalid vertex {base_vertex}")
    target = base.target
    projection = [base_vertex]
    depth = [0]
    via: List[Optional[int]] = [None]
    tree_half_edges: List[int] = []
    parents: List[int] = []
    frontier = [0]
    for level in range(1, r + 1):
        next_frontier = []
        for node in frontier:
            back = via[node]
            for h in base.incidence[projection[node]]:
                if back is not None and h == int(base.partner[back]):
                    continue
                child = len(projection)
                projection.append(int(target[h]))
                depth.append(level)
                via.append(h)
                parents.append(node)
                tree_half_edges.append(h)
                next_frontier.append(child)
        if len(projection) > max_vertices:
            raise BudgetExceededError(
                f"Cover ball exceeds {max_vertices} vertices",
                max_vertices,
                len(projection),
            )
        frontier = next_frontier

    m = len(tree_half_edges)
    source = np.empty(2 * m, dtype=np.int64)
    source[0::2] = parents
    source[1::2] = np.arange(1, m + 1)
    partner = np.arange(2 * m, dtype=np.int64) ^ 1
    base_edges = np.empty(2 * m, dtype=np.int64)
    base_edges[0::2] = tree_half_edges
    if m:
        base_edges[1::2] = base.partner[np.array(tree_half_edges, dtype=np.int64)]
    marks = None if base.marks is None else base.marks[base_edges]
    labels = None if base.labels is None else tuple(base.labels[h] for h in base_edges)
    graph = MarkedGraph(len(projection), source, partner, marks, labels)
    depth_array = np.array(depth, dtype=np.int64)
    return RootedBall(
        center=base_vertex,
        radius=r,
        graph=graph,
        distance_labels=depth_array,
        vertex_map=np.array(projection, dtype=np.int64),
        boundary=depth_array == r,
    )


def cycle_graph(n: int) -> MarkedGraph:
    """The n-cycle C_n (a loop for n = 1, a double edge for n = 2)."""
    return build_graph(n, [(x, (x + 1) % n) for x in range(n)])
