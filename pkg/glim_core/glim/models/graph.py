"""Marked multigraphs stored as paired half-edges.

Half-edges ``2k`` and ``2k + 1`` are the two orientations of the k-th
unoriented edge, so ``partner(e) == e ^ 1``. ``source[e]`` is the tail e₋ and
``target[e] == source[partner[e]]`` is the head e₊.
"""
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Hashable, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

logger = logging.getLogger(__name__)

MARK_SYMMETRIES = ("equal", "conjugate")


@dataclass(frozen=True, eq=False)
class MarkedGraph:
    """Finite multigraph G = (V, E, ξ) with a fixed-point free involution on E.

    Args:
        vertex_count (int): Number of vertices, labelled 0..n-1.
        source (np.ndarray): Tail vertex of every half-edge.
        partner (np.ndarray): Involution e -> e⁻¹.
        marks (np.ndarray, optional): Complex mark ξ(e) of every half-edge.
        labels (tuple, optional): Discrete mark of every half-edge (e.g. the
            generator word of a Schreier edge).
    """

    vertex_count: int
    source: np.ndarray
    partner: np.ndarray
    marks: Optional[np.ndarray] = None
    labels: Optional[Tuple[Hashable, ...]] = None

    def __post_init__(self):
        source = np.ascontiguousarray(self.source, dtype=np.int64)
        partner = np.ascontiguousarray(self.partner, dtype=np.int64)
        if source.shape != partner.shape or source.ndim != 1:
            raise ValueError("source and partner must be 1-d arrays of equal size")
        m2 = source.size
        if m2 and (source.min() < 0 or source.max() >= self.vertex_count):
            raise ValueError("Invalid half-edge source vertex")
        if m2 and (partner.min() < 0 or partner.max() >= m2):
            raise ValueError("Invalid partner id")
        ids = np.arange(m2)
        if np.any(partner[partner] != ids) or np.any(partner == ids):
            raise ValueError("partner must be an involution without fixed point")
        source.setflags(write=False)
        partner.setflags(write=False)
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "partner", partner)
        if self.marks is not None:
            marks = np.array(self.marks, dtype=np.complex128)
            if marks.shape != (m2,):
                raise ValueError("one mark per half-edge is required")
            marks.setflags(write=False)
            object.__setattr__(self, "marks", marks)
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != m2:
                raise ValueError("one label per half-edge is required")
            object.__setattr__(self, "labels", labels)

    # ===== Sizes
    @property
    def num_half_edges(self) -> int:
        return int(self.source.size)

    @property
    def num_edges(self) -> int:
        return self.num_half_edges // 2

    @property
    def is_marked(self) -> bool:
        return self.marks is not None or self.labels is not None

    @cached_property
    def target(self) -> np.ndarray:
        target = self.source[self.partner]
        target.setflags(write=False)
        return target

    def degrees(self) -> np.ndarray:
        return np.bincount(self.source, minlength=self.vertex_count)

    def degree(self, v: int) -> int:
        return int(self.degrees()[v])

    @cached_property
    def incidence(self) -> Tuple[Tuple[int, ...], ...]:
        """Outgoing half-edges per vertex, in increasing half-edge id."""
        out: List[List[int]] = [[] for _ in range(self.vertex_count)]
        for e, v in enumerate(self.source.tolist()):
            out[v].append(e)
        return tuple(tuple(edges) for edges in out)

    def out_edges(self, v: int) -> Tuple[int, ...]:
        return self.incidence[v]

    def mark(self, e: int) -> complex:
        return 1.0 + 0j if self.marks is None else complex(self.marks[e])

    def label(self, e: int):
        return None if self.labels is None else self.labels[e]

    def edges(self) -> Iterable[Tuple[int, int, Optional[complex]]]:
        """Unoriented edges as (u, v, mark of the u -> v orientation).

        Each edge is reported through its half-edge with the smaller id.
        """
        for e in np.flatnonzero(self.partner > np.arange(self.num_half_edges)):
            mark = None if self.marks is None else complex(self.marks[e])
            yield int(self.source[e]), int(self.target[e]), mark

    def mark_symmetry(self) -> Optional[str]:
        """'equal' if ξ(e⁻¹) = ξ(e), 'conjugate' if ξ(e⁻¹) = conj ξ(e)."""
        if self.marks is None:
            return None
        reverse = self.marks[self.partner]
        if np.array_equal(reverse, self.marks):
            return "equal"
        if np.array_equal(reverse, np.conj(self.marks)):
            return "conjugate"
        return None

    # ===== Derived structures
    @cached_property
    def adjacency_csr(self) -> sparse.csr_matrix:
        """Unweighted half-edge counts; a loop contributes 2 on the diagonal."""
        n = self.vertex_count
        data = np.ones(self.num_half_edges, dtype=np.float64)
        # entry (v, u) counts half-edges u -> v
        matrix = sparse.coo_matrix((data, (self.target, self.source)), shape=(n, n))
        return matrix.tocsr()

    def connected_components(self) -> Tuple[int, np.ndarray]:
        return csgraph.connected_components(self.adjacency_csr, directed=False)

    def is_connected(self) -> bool:
        return self.vertex_count <= 1 or self.connected_components()[0] == 1

    def induced_subgraph(self, vertices: Sequence[int]) -> "MarkedGraph":
        """Subgraph spanned by ``vertices``; vertex i of the result is vertices[i]."""
        return self.induced_with_edges(vertices)[0]

    def induced_with_edges(
        self, vertices: Sequence[int]
    ) -> Tuple["MarkedGraph", np.ndarray]:
        """Induced subgraph plus the original id of every kept half-edge.

        Runs in time proportional to the total degree of ``vertices``.
        """
        local = {int(v): i for i, v in enumerate(vertices)}
        target = self.target
        partner = self.partner
        kept = sorted(
            {
                min(h, int(partner[h]))
                for v in local
                for h in self.incidence[v]
                if int(target[h]) in local
            }
        )
        half_edges = np.empty(2 * len(kept), dtype=np.int64)
        half_edges[0::2] = kept
        half_edges[1::2] = partner[half_edges[0::2]]
        source = np.array(
            [local[int(self.source[h])] for h in half_edges], dtype=np.int64
        )
        local_partner = np.arange(half_edges.size, dtype=np.int64) ^ 1
        marks = None if self.marks is None else self.marks[half_edges]
        labels = (
            None if self.labels is None else tuple(self.labels[h] for h in half_edges)
        )
        return MarkedGraph(len(local), source, local_partner, marks, labels), half_edges

    def to_networkx(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        graph.add_nodes_from(range(self.vertex_count))
        forward = np.flatnonzero(self.partner > np.arange(self.num_half_edges))
        for e, (u, v, mark) in zip(forward.tolist(), self.edges()):
            attrs = {"half_edge": e}
            if mark is not None:
                attrs["mark"] = mark
            if self.labels is not None:
                attrs["label"] = self.labels[e]
            graph.add_edge(u, v, **attrs)
        return graph

    def forget_labels(self) -> "MarkedGraph":
        """Same graph and marks without the discrete labels."""
        if self.labels is None:
            return self
        return MarkedGraph(self.vertex_count, self.source, self.partner, self.marks)

    def same_as(self, other: "MarkedGraph") -> bool:
        """Structural equality of the stored half-edge arrays (not isomorphism)."""
        if self.vertex_count != other.vertex_count:
            return False
        if not (
            np.array_equal(self.source, other.source)
            and np.array_equal(self.partner, other.partner)
        ):
            return False
        if (self.marks is None) != (other.marks is None):
            return False
        if self.marks is not None and not np.array_equal(self.marks, other.marks):
            return False
        return self.labels == other.labels

    def __repr__(self):
        return (
            f"MarkedGraph(n={self.vertex_count}, edges={self.num_edges}, "
            f"marked={self.is_marked})"
        )


def build_graph(
    n: int,
    edges: Iterable[Sequence],
    symmetry: str = "equal",
    labels: Optional[Sequence[Tuple[Hashable, Hashable]]] = None,
) -> MarkedGraph:
    """Builds a MarkedGraph from a list of (u, v) or (u, v, mark) edges.

    Args:
        n (int): vertex count.
        edges: each item is (u, v) or (u, v, mark). The mark is assigned to
            u -> v; the reverse orientation gets the same mark
            (symmetry="equal") or its conjugate (symmetry="conjugate").
            Unmarked edges get mark 1 when any other edge carries a mark.
        labels: optional (label of u -> v, label of v -> u) per edge.
    """
    if n < 0:
        raise ValueError(f"Invalid vertex count {n}")
    if symmetry not in MARK_SYMMETRIES:
        raise ValueError(f"Invalid mark symmetry {symmetry!r}")
    edges = list(edges)
    source = np.empty(2 * len(edges), dtype=np.int64)
    marks = np.ones(2 * len(edges), dtype=np.complex128)
    any_mark = False
    for k, edge in enumerate(edges):
        if len(edge) not in (2, 3):
            raise ValueError(f"Invalid edge {edge!r}")
        u, v = int(edge[0]), int(edge[1])
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"Invalid edge ({u}, {v}): vertex out of range 0..{n - 1}")
        source[2 * k] = u
        source[2 * k + 1] = v
        if len(edge) == 3 and edge[2] is not None:
            any_mark = True
            mark = complex(edge[2])
            marks[2 * k] = mark
            marks[2 * k + 1] = mark if symmetry == "equal" else mark.conjugate()
    partner = np.arange(source.size, dtype=np.int64) ^ 1

    flat_labels = None
    if labels is not None:
        labels = list(labels)
        if len(labels) != len(edges):
            raise ValueError("one label pair per edge is required")
        flat_labels = tuple(label for pair in labels for label in pair)
    return MarkedGraph(n, source, partner, marks if any_mark else None, flat_labels)


def disjoint_union(graphs: Sequence[MarkedGraph]) -> MarkedGraph:
    offsets = np.cumsum([0] + [g.vertex_count for g in graphs])
    edge_offsets = np.cumsum([0] + [g.num_half_edges for g in graphs])
    source = np.concatenate(
        [g.source + offsets[i] for i, g in enumerate(graphs)] or [np.empty(0, np.int64)]
    )
    partner = np.concatenate(
        [g.partner + edge_offsets[i] for i, g in enumerate(graphs)]
        or [np.empty(0, np.int64)]
    )
    marks = None
    if any(g.marks is not None for g in graphs):
        marks = np.concatenate(
            [
                g.marks if g.marks is not None else np.ones(g.num_half_edges)
                for g in graphs
            ]
        )
    return MarkedGraph(int(offsets[-1]), source, partner, marks)


def bfs_distances(g: MarkedGraph, v: int) -> np.ndarray:
    """Shortest-path distances from ``v``; ``np.inf`` marks unreachable vertices.

    The result is indexed by vertex id.
    """
    if not 0 <= v < g.vertex_count:
        raise ValueError(f"Invalid vertex {v}")
    return csgraph.shortest_path(
        g.adjacency_csr, directed=False, unweighted=True, indices=v
    )


def count_short_cycles(g: MarkedGraph) -> dict:
    """Numbers of loops, pairs of parallel edges and triangles.

    Triangles are counted on the underlying simple graph.
    """
    loops = 0
    pairs = {}
    for u, v, _ in g.edges():
        if u == v:
            loops += 1
        else:
            key = (min(u, v), max(u, v))
            pairs[key] = pairs.get(key, 0) + 1
    parallel = sum(c * (c - 1) // 2 for c in pairs.values())
    simple = nx.Graph()
    simple.add_nodes_from(range(g.vertex_count))
    simple.add_edges_from(pairs.keys())
    triangles = sum(nx.triangles(simple).values()) // 3
    return {"loops": loops, "parallel": parallel, "triangles": triangles}
