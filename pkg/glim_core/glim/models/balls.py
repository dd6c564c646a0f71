"""Rooted balls, their isomorphism classes and neighborhood distributions.

Canonical codes come in three flavours, told apart by their first byte:

- ``T``: rooted trees, encoded bottom-up (AHU) with the marks of both
  orientations of every parent/child edge.
- ``G``: any other ball up to ``exact_limit`` vertices, minimized over an
  individualization-refinement search tree pruned by discovered automorphisms.
- ``H``: color-refinement hash, used above the size limit or when the search
  exceeds its leaf budget. Distinct classes may collide; such classes are
  flagged ``exact=False``.
"""
import hashlib
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from glim.models.graph import MarkedGraph, build_graph
from glim.models.words import Word

logger = logging.getLogger(__name__)

EXACT_LIMIT = 64
LEAF_BUDGET = 5000
MARK_GRID = 1e-9


@dataclass(frozen=True, eq=False)
class RootedBall:
    """Ball of ``radius`` around ``center``; local vertex 0 is the root.

    Args:
        graph (MarkedGraph): Induced subgraph, vertices relabelled 0..size-1.
        distance_labels (np.ndarray): BFS distance of each local vertex.
        vertex_map (np.ndarray): Original id of each local vertex.
        boundary (np.ndarray): True where a vertex may have neighbours outside
            the ball (truncation frontier).
    """

    center: int
    radius: int
    graph: MarkedGraph
    distance_labels: np.ndarray
    vertex_map: np.ndarray
    boundary: Optional[np.ndarray] = None

    @property
    def size(self) -> int:
        return self.graph.vertex_count

    @property
    def root(self) -> int:
        return 0


@dataclass(frozen=True)
class RootedBallClass:
    canonical_code: bytes
    size: int
    exact: bool = True

    @property
    def hex(self) -> str:
        return self.canonical_code.hex()

    @property
    def kind(self) -> str:
        return {b"T": "tree", b"G": "graph", b"H": "hash"}[self.canonical_code[:1]]


@dataclass(frozen=True, eq=False)
class EdgeRootedBall:
    """Ball around an oriented edge: all vertices within ``radius`` of e₋ or e₊."""

    graph: MarkedGraph
    root_edge: int
    radius: int
    vertex_map: np.ndarray

    @property
    def tail(self) -> int:
        return int(self.graph.source[self.root_edge])

    @property
    def head(self) -> int:
        return int(self.graph.target[self.root_edge])

    @property
    def root_mark(self) -> complex:
        return self.graph.mark(self.root_edge)

    @property
    def head_degree(self) -> int:
        return self.graph.degree(self.head)

    @property
    def tail_degree(self) -> int:
        return self.graph.degree(self.tail)


@dataclass
class NeighborhoodDistribution:
    """Law U(G) of the radius-r ball class at a uniform root."""

    radius: int
    weights: Dict[RootedBallClass, float]
    counts: Dict[RootedBallClass, int] = field(default_factory=dict)
    total: int = 0

    @property
    def exact(self) -> bool:
        return all(c.exact for c in self.weights)

    def probability(self, cls: RootedBallClass) -> float:
        for other, weight in self.weights.items():
            if other.canonical_code == cls.canonical_code:
                return weight
        return 0.0

    def by_code(self) -> Dict[bytes, float]:
        return {c.canonical_code: w for c, w in self.weights.items()}

    def most_common(
        self, k: Optional[int] = None
    ) -> List[Tuple[RootedBallClass, float]]:
        ranked = sorted(
            self.weights.items(), key=lambda item: (-item[1], item[0].canonical_code)
        )
        return ranked if k is None else ranked[:k]

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "total": self.total,
            "exact": self.exact,
            "classes": [
                {
                    "code": c.hex,
                    "kind": c.kind,
                    "size": c.size,
                    "exact": c.exact,
                    "count": self.counts.get(c, 0),
                    "weight": w,
                }
                for c, w in self.most_common()
            ],
        }


# ===== Ball extraction
def bfs_layers(g: MarkedGraph, roots: Sequence[int], r: int) -> Dict[int, int]:
    dist = {}
    frontier = []
    for v in roots:
        if v not in dist:
            dist[v] = 0
            frontier.append(v)
    target = g.target
    depth = 0
    while frontier and depth < r:
        depth += 1
        next_frontier = []
        for u in frontier:
            for h in g.incidence[u]:
                w = int(target[h])
                if w not in dist:
                    dist[w] = depth
                    next_frontier.append(w)
        frontier = next_frontier
    return dist


def ball(g: MarkedGraph, v: int, r: int) -> RootedBall:
    if not 0 <= v < g.vertex_count:
        raise ValueError(f"Invalid vertex {v}")
    if r < 0:
        raise ValueError(f"Invalid radius {r}")
    dist = bfs_layers(g, [v], r)
    vertices = list(dist)  # insertion order is BFS order, root first
    sub = g.induced_subgraph(vertices)
    labels = np.array([dist[u] for u in vertices], dtype=np.int64)
    return RootedBall(
        center=v,
        radius=r,
        graph=sub,
        distance_labels=labels,
        vertex_map=np.array(vertices, dtype=np.int64),
        boundary=labels == r,
    )


def edge_ball(g: MarkedGraph, e: int, r: int) -> EdgeRootedBall:
    if not 0 <= e < g.num_half_edges:
        raise ValueError(f"Invalid half-edge {e}")
    tail, head = int(g.source[e]), int(g.target[e])
    dist = bfs_layers(g, [tail, head], r)
    vertices = list(dist)
    sub, half_edges = g.induced_with_edges(vertices)
    root_edge = int(np.flatnonzero(half_edges == e)[0])
    return EdgeRootedBall(sub, root_edge, r, np.array(vertices, dtype=np.int64))


# ===== Mark keys
def _quantize(x: float, grid: float) -> int:
    return int(round(x / grid))


def _label_token(label) -> str:
    if label is None:
        return ""
    if isinstance(label, Word):
        return label.token()
    return repr(label).encode().hex()


def half_edge_keys(g: MarkedGraph, grid: float = MARK_GRID) -> List[str]:
    """Comparable mark key per half-edge; '' for unmarked graphs.

    Keys never contain '(', ')', ';' or spaces.
    """
    keys = [""] * g.num_half_edges
    if g.marks is not None:
        re = g.marks.real.tolist()
        im = g.marks.imag.tolist()
        for e in range(g.num_half_edges):
            keys[e] = f"{_quantize(re[e], grid)},{_quantize(im[e], grid)}"
    if g.labels is not None:
        for e, label in enumerate(g.labels):
            keys[e] = f"{keys[e]}|{_label_token(label)}"
    return keys


# ===== Tree codes
def _tree_code(g: MarkedGraph, root: int, keys: List[str]) -> bytes:
    target = g.target
    parent_edge = {root: None}
    order = [root]
    for u in order:
        for h in g.incidence[u]:
            w = int(target[h])
            if w not in parent_edge:
                parent_edge[w] = h
                order.append(w)
    children: Dict[int, List[int]] = defaultdict(list)
    for w in order[1:]:
        children[int(g.source[parent_edge[w]])].append(w)
    codes: Dict[int, str] = {}
    for w in reversed(order):
        inner = "".join(sorted(codes.pop(c) for c in children[w]))
        h = parent_edge[w]
        if h is None:
            codes[w] = f"({inner})"
        else:
            codes[w] = f"({keys[h]}/{keys[int(g.partner[h])]}{inner})"
    return b"T" + codes[root].encode()


# ===== Individualization-refinement
class _LeafBudgetExceeded(Exception):
    pass


def rank_values(values: Sequence) -> List[int]:
    table = {value: i for i, value in enumerate(sorted(set(values)))}
    return [table[value] for value in values]


class _CanonicalSearch:
    """Minimum leaf code over the individualization-refinement search tree."""

    def __init__(self, g: MarkedGraph, keys: List[str], leaf_budget: int):
        self.nv = g.vertex_count
        self.src = g.source.tolist()
        self.dst = g.target.tolist()
        self.keys = keys
        self.out = [list(edges) for edges in g.incidence]
        self.leaf_budget = leaf_budget
        self.leaves = 0
        self.first = None
        self.best = None
        self.automorphisms: List[List[int]] = []

    def refine(self, colors: List[int]) -> List[int]:
        count = len(set(colors))
        while True:
            signatures = [
                (
                    colors[v],
                    tuple(
                        sorted((self.keys[e], colors[self.dst[e]]) for e in self.out[v])
                    ),
                )
                for v in range(self.nv)
            ]
            colors = rank_values(signatures)
            new_count = len(set(colors))
            if new_count == count:
                return colors
            count = new_count

    def run(self, colors: List[int]) -> bytes:
        self._visit(self.refine(colors), ())
        code, _ = self.best
        body = ";".join(f"{a} {b} {key}" for a, b, key in code)
        return f"G{self.nv}:{body}".encode()

    def _visit(self, colors: List[int], prefix: Tuple[int, ...]):
        cells: Dict[int, List[int]] = defaultdict(list)
        for v, c in enumerate(colors):
            cells[c].append(v)
        if len(cells) == self.nv:
            self._leaf(colors)
            return
        _, color = min((len(cell), c) for c, cell in cells.items() if len(cell) > 1)
        tried: List[int] = []
        for w in cells[color]:
            if tried and w in self._orbit(tried, prefix):
                continue
            tried.append(w)
            split = rank_values([(c, v != w) for v, c in enumerate(colors)])
            self._visit(self.refine(split), prefix + (w,))

    def _orbit(self, seeds: List[int], prefix: Tuple[int, ...]) -> set:
        generators = [
            gamma for gamma in self.automorphisms if all(gamma[p] == p for p in prefix)
        ]
        orbit = set(seeds)
        stack = list(seeds)
        while stack:
            v = stack.pop()
            for gamma in generators:
                w = gamma[v]
                if w not in orbit:
                    orbit.add(w)
                    stack.append(w)
        return orbit

    def _leaf(self, position: List[int]):
        self.leaves += 1
        if self.leaves > self.leaf_budget:
            raise _LeafBudgetExceeded()
        code = tuple(
            sorted(
                (position[self.src[e]], position[self.dst[e]], self.keys[e])
                for e in range(len(self.src))
            )
        )
        if self.first is None:
            self.first = self.best = (code, position)
            return
        for reference_code, reference in (self.first, self.best):
            if code == reference_code:
                inverse = [0] * self.nv
                for v, p in enumerate(reference):
                    inverse[p] = v
                gamma = [inverse[position[v]] for v in range(self.nv)]
                if any(gamma[v] != v for v in range(self.nv)):
                    self.automorphisms.append(gamma)
                return
        if code < self.best[0]:
            self.best = (code, position)


def _refinement_hash(g: MarkedGraph, keys: List[str], colors: List[int]) -> bytes:
    dst = g.target.tolist()
    digest = hashlib.blake2b(digest_size=16)
    count = len(set(colors))
    while True:
        signatures = [
            (
                colors[v],
                tuple(sorted((keys[e], colors[dst[e]]) for e in g.incidence[v])),
            )
            for v in range(g.vertex_count)
        ]
        digest.update(repr(sorted(signatures)).encode())
        colors = rank_values(signatures)
        if len(set(colors)) == count:
            break
        count = len(set(colors))
    return b"H" + digest.digest()


def refined_code(
    g: MarkedGraph,
    keys: List[str],
    colors: List[int],
    exact_limit: int,
    leaf_budget: int,
) -> Tuple[bytes, bool]:
    if g.vertex_count <= exact_limit:
        try:
            return _CanonicalSearch(g, keys, leaf_budget).run(colors), True
        except _LeafBudgetExceeded:
            logger.warning(
                f"Canonical search exceeded {leaf_budget} leaves on a ball of "
                f"{g.vertex_count} vertices; using refinement hash"
            )
    else:
        logger.debug(
            f"Ball of {g.vertex_count} vertices above exact limit {exact_limit}"
        )
    return _refinement_hash(g, keys, colors), False


def canonical_class(
    b: RootedBall,
    exact_limit: int = EXACT_LIMIT,
    grid: float = MARK_GRID,
    leaf_budget: int = LEAF_BUDGET,
) -> RootedBallClass:
    """Isomorphism class [G, o] of a rooted (marked) ball.

    Two balls within ``exact_limit`` vertices get equal codes iff they are
    isomorphic as rooted marked graphs (marks compared on a ``grid``).
    """
    g = b.graph
    keys = half_edge_keys(g, grid)
    if g.num_edges == g.vertex_count - 1:
        return RootedBallClass(_tree_code(g, b.root, keys), g.vertex_count, True)
    colors = [0 if v == b.root else 1 for v in range(g.vertex_count)]
    code, exact = refined_code(g, keys, colors, exact_limit, leaf_budget)
    return RootedBallClass(code, g.vertex_count, exact)


def edge_canonical_class(
    eb: EdgeRootedBall,
    exact_limit: int = EXACT_LIMIT,
    grid: float = MARK_GRID,
    leaf_budget: int = LEAF_BUDGET,
) -> RootedBallClass:
    """Isomorphism class of a ball rooted at an oriented edge."""
    g = eb.graph
    keys = half_edge_keys(g, grid)
    keys[eb.root_edge] = "R" + keys[eb.root_edge]
    reverse = int(g.partner[eb.root_edge])
    keys[reverse] = "r" + keys[reverse]
    tail, head = eb.tail, eb.head
    colors = rank_values(
        [0 if v == tail else 1 if v == head else 2 for v in range(g.vertex_count)]
    )
    code, exact = refined_code(g, keys, colors, exact_limit, leaf_budget)
    return RootedBallClass(code, g.vertex_count, exact)


# ===== Distributions
def neighborhood_distribution(
    g: MarkedGraph,
    r: int,
    vertices: Optional[Sequence[int]] = None,
    **canonical_options,
) -> NeighborhoodDistribution:
    """Weight of class c = |{v : [B_r(G, v)] = c}| / |V|.

    Args:
        vertices: restrict the uniform root to these vertices (sampling).
    """
    roots = range(g.vertex_count) if vertices is None else vertices
    counts: Dict[RootedBallClass, int] = defaultdict(int)
    total = 0
    for v in roots:
        counts[canonical_class(ball(g, int(v), r), **canonical_options)] += 1
        total += 1
    if total == 0:
        return NeighborhoodDistribution(r, {}, {}, 0)
    inexact = sum(1 for c in counts if not c.exact)
    if inexact:
        logger.warning(f"{inexact} ball classes use refinement-hash codes")
    weights = {c: k / total for c, k in counts.items()}
    return NeighborhoodDistribution(r, weights, dict(counts), total)


Law = Union[NeighborhoodDistribution, Mapping[RootedBallClass, float]]


def _by_code(p: Law) -> Dict[bytes, float]:
    if isinstance(p, NeighborhoodDistribution):
        return p.by_code()
    out: Dict[bytes, float] = defaultdict(float)
    for c, w in p.items():
        out[c.canonical_code] += w
    return out


def total_variation(p: Law, q: Law) -> float:
    """sup_A |P(A) - Q(A)| = half the l1 distance between class weights."""
    pw, qw = _by_code(p), _by_code(q)
    codes = set(pw) | set(qw)
    return 0.5 * math.fsum(abs(pw.get(c, 0.0) - qw.get(c, 0.0)) for c in codes)


def point_mass(cls: RootedBallClass, radius: int) -> NeighborhoodDistribution:
    return NeighborhoodDistribution(radius, {cls: 1.0}, {cls: 1}, 1)


def unimodularity_gap(
    g: MarkedGraph,
    f: Callable[[EdgeRootedBall], float],
    r: int,
    **canonical_options,
) -> Tuple[float, float]:
    """Both sides of the mass-transport identity for U(G).

    ``f`` is evaluated once per edge-rooted class of radius ``r``, so it acts
    as a function of the class. Returns
    (E Σ_{e: e₋ = o} f(G, e), E Σ_{e: e₊ = o} f(G, e)).
    """
    if g.vertex_count == 0:
        return 0.0, 0.0
    values: Dict[bytes, float] = {}
    outgoing: List[List[float]] = [[] for _ in range(g.vertex_count)]
    incoming: List[List[float]] = [[] for _ in range(g.vertex_count)]
    target = g.target
    for e in range(g.num_half_edges):
        eb = edge_ball(g, e, r)
        code = edge_canonical_class(eb, **canonical_options).canonical_code
        if code not in values:
            values[code] = f(eb)
        outgoing[int(g.source[e])].append(values[code])
        incoming[int(target[e])].append(values[code])
    n = g.vertex_count
    lhs = math.fsum(math.fsum(row) for row in outgoing) / n
    rhs = math.fsum(math.fsum(row) for row in incoming) / n
    return lhs, rhs


# ===== Reference balls
def regular_tree_ball(d: int, r: int) -> RootedBall:
    """Ball of radius r in the d-regular tree T_d, built breadth first."""
    if d < 1 or r < 0:
        raise ValueError(f"Invalid regular tree parameters d={d}, r={r}")
    edges = []
    depth = [0]
    frontier = [0]
    for level in range(1, r + 1):
        next_frontier = []
        for u in frontier:
            for _ in range(d if u == 0 else d - 1):
                w = len(depth)
                depth.append(level)
                edges.append((u, w))
                next_frontier.append(w)
        frontier = next_frontier
    return tree_ball(len(depth), edges, r)


def tree_ball(n: int, edges: Sequence[Tuple[int, int]], radius: int) -> RootedBall:
    """Wraps a tree given by parent -> child edges (root 0) as a RootedBall."""
    g = build_graph(n, edges)
    depth = np.zeros(n, dtype=np.int64)
    for u, w in edges:
        depth[w] = depth[u] + 1
    return RootedBall(
        center=0,
        radius=radius,
        graph=g,
        distance_labels=depth,
        vertex_map=np.arange(n, dtype=np.int64),
        boundary=depth == radius,
    )
