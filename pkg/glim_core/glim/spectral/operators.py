"""Adjacency, local and non-backtracking operators of marked graphs.

Vertex operators follow (Aφ)(v) = Σ_u a(G, u, v) φ(u), so entry (v, u) is
the kernel at o⁻ = u, o⁺ = v. For the weighted adjacency this is
Σ_{e: e₋ = u, e₊ = v} ξ(e).
"""
import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple, Union

import numpy as np
from scipy import sparse

from glim.models.balls import (
    EXACT_LIMIT,
    LEAF_BUDGET,
    bfs_layers,
    half_edge_keys,
    rank_values,
    refined_code,
)
from glim.models.graph import MarkedGraph

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SparseOperator:
    """Square sparse operator with an optional self-adjointness flag."""

    matrix: sparse.csr_matrix
    symmetric: bool = False
    name: str = ""

    def __post_init__(self):
        matrix = sparse.csr_matrix(self.matrix)
        if matrix.shape[0] != matrix.shape[1]:
            raise ValueError(f"Operator must be square, got {matrix.shape}")
        if self.symmetric and matrix.nnz:
            diff = abs(matrix - matrix.conj().T)
            if diff.nnz and diff.max() > SYMMETRY_TOL * max(1.0, abs(matrix).max()):
                raise ValueError(
                    f"{self.name or 'operator'} is flagged symmetric but is not"
                )
        object.__setattr__(self, "matrix", matrix)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    def entries(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        coo = self.matrix.tocoo()
        return coo.row, coo.col, coo.data

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.matrix @ x

    def is_integer_valued(self) -> bool:
        data = self.matrix.data
        real = np.real(data)
        return bool(np.all(np.imag(data) == 0) and np.all(real == np.round(real)))

    def __matmul__(self, other):
        if isinstance(other, SparseOperator):
            return SparseOperator(
                self.matrix @ other.matrix, name=f"{self.name}@{other.name}"
            )
        return self.matrix @ other


OperatorLike = Union[SparseOperator, sparse.spmatrix, np.ndarray]


def as_matrix(a: OperatorLike):
    return a.matrix if isinstance(a, SparseOperator) else a


# ===== Vertex operators
def adjacency(g: MarkedGraph) -> SparseOperator:
    """Half-edge counts between vertices; a loop adds 2 to the diagonal."""
    return SparseOperator(g.adjacency_csr, symmetric=True, name="adjacency")


def weighted_adjacency(g: MarkedGraph) -> SparseOperator:
    """Entry (v, u) = Σ_{e: e₋ = u, e₊ = v} ξ(e).

    Self-adjoint iff ξ(e⁻¹) = conj ξ(e).
    """
    if g.marks is None:
        return adjacency(g)
    n = g.vertex_count
    matrix = sparse.coo_matrix((g.marks, (g.target, g.source)), shape=(n, n)).tocsr()
    if np.all(g.marks.imag == 0):
        matrix = matrix.real.tocsr()
    symmetric = np.allclose(g.marks[g.partner], np.conj(g.marks))
    return SparseOperator(matrix, symmetric=bool(symmetric), name="weighted_adjacency")


def degree_diagonal(g: MarkedGraph) -> SparseOperator:
    return SparseOperator(
        sparse.diags(g.degrees().astype(np.float64), format="csr"),
        symmetric=True,
        name="degree",
    )


# ===== Local kernels
@dataclass(frozen=True, eq=False)
class DoublyRootedBall:
    """Vertices within ``radius`` of o⁻ or o⁺, with the two roots marked."""

    graph: MarkedGraph
    tail: int
    head: int
    distance: int
    vertex_map: np.ndarray


@dataclass(frozen=True)
class LocalKernel:
    """a(G, o⁻, o⁺) with finite range.

    Args:
        range (int): a vanishes when d(o⁻, o⁺) > range.
        evaluator: function of a DoublyRootedBall; must only depend on its
            isomorphism class.
        radius (int): locality radius of the balls handed to ``evaluator``;
            defaults to ``range``.
        symmetric (bool): a(G, o⁻, o⁺) = conj a(G, o⁺, o⁻).
    """

    range: int
    evaluator: Callable[[DoublyRootedBall], complex]
    radius: Optional[int] = None
    symmetric: bool = True
    name: str = "kernel"

    @property
    def ball_radius(self) -> int:
        return self.range if self.radius is None else self.radius


def _pair_ball(
    g: MarkedGraph, u: int, v: int, distance: int, radius: int
) -> DoublyRootedBall:
    dist = bfs_layers(g, [u, v], radius)
    vertices = list(dist)
    sub = g.induced_subgraph(vertices)
    tail = 0
    head = vertices.index(v)
    vertex_map = np.array(vertices, dtype=np.int64)
    return DoublyRootedBall(sub, tail, head, distance, vertex_map)


def _pair_code(ball: DoublyRootedBall) -> bytes:
    g = ball.graph
    keys = half_edge_keys(g)
    roles = [
        0 if w == ball.tail else 1 if w == ball.head else 2
        for w in range(g.vertex_count)
    ]
    colors = rank_values(roles)
    code, _ = refined_code(g, keys, colors, EXACT_LIMIT, LEAF_BUDGET)
    return (b"=" if ball.tail == ball.head else b"~") + code


def local_operator(
    g: MarkedGraph,
    kernel: LocalKernel,
    radius: Optional[int] = None,
    canonical: bool = False,
) -> SparseOperator:
    """A_{G,a}: entry (v, u) = a(G, o⁻ = u, o⁺ = v), zero across components.

    Args:
        radius: ball radius available to the kernel; must cover its range.
        canonical: evaluate ``kernel`` once per doubly-rooted class.
    """
    radius = kernel.ball_radius if radius is None else radius
    if kernel.range > radius:
        raise ValueError(f"Kernel range {kernel.range} exceeds ball radius {radius}")
    cache: Dict[bytes, complex] = {}
    rows, cols, data = [], [], []
    for u in range(g.vertex_count):
        for v, distance in bfs_layers(g, [u], kernel.range).items():
            pair = _pair_ball(g, u, v, distance, radius)
            if canonical:
                code = _pair_code(pair)
                if code not in cache:
                    cache[code] = kernel.evaluator(pair)
                value = cache[code]
            else:
                value = kernel.evaluator(pair)
            if value != 0:
                rows.append(v)
                cols.append(u)
                data.append(value)
    n = g.vertex_count
    values = np.array(data, dtype=np.complex128)
    if np.all(values.imag == 0):
        values = values.real
    matrix = sparse.coo_matrix((values, (rows, cols)), shape=(n, n)).tocsr()
    return SparseOperator(matrix, symmetric=kernel.symmetric, name=kernel.name)


def _adjacency_value(ball: DoublyRootedBall) -> complex:
    g = ball.graph
    total = 0j
    for e in g.incidence[ball.tail]:
        if int(g.target[e]) == ball.head:
            total += g.mark(e)
    return total


def adjacency_kernel() -> LocalKernel:
    """Σ_{e: e± = o±} ξ(e)."""
    return LocalKernel(range=1, evaluator=_adjacency_value, name="adjacency")


def distance_kernel(k: int) -> LocalKernel:
    """1{d(o⁻, o⁺) = k}."""
    return LocalKernel(
        range=k,
        evaluator=lambda ball: 1.0 if ball.distance == k else 0.0,
        name=f"distance_{k}",
    )


def identity_kernel() -> LocalKernel:
    return LocalKernel(
        range=0,
        evaluator=lambda ball: 1.0 if ball.tail == ball.head else 0.0,
        name="identity",
    )


# ===== Non-backtracking
def _nb_pattern(g: MarkedGraph) -> Tuple[np.ndarray, np.ndarray]:
    """Pairs (f, e) with e₊ = f₋ and f ≠ e⁻¹."""
    m2 = g.num_half_edges
    order = np.argsort(g.source, kind="stable")
    counts = g.degrees()
    offsets = np.concatenate([[0], np.cumsum(counts)])
    target = g.target
    per_edge = counts[target]
    e_rep = np.repeat(np.arange(m2), per_edge)
    starts = np.repeat(offsets[target], per_edge)
    intra = np.arange(e_rep.size) - np.repeat(np.cumsum(per_edge) - per_edge, per_edge)
    f = order[starts + intra]
    keep = f != g.partner[e_rep]
    return f[keep], e_rep[keep]


def non_backtracking(g: MarkedGraph, weighted: bool = False) -> SparseOperator:
    """B[f, e] = ξ(e)·1{e₊ = f₋, e ≠ f⁻¹} on C^E; ξ ≡ 1 when unweighted."""
    if weighted and g.marks is None:
        raise ValueError("Weighted non-backtracking operator requires marks")
    rows, cols = _nb_pattern(g)
    m2 = g.num_half_edges
    if weighted:
        data = g.marks[cols]
        if np.all(data.imag == 0):
            data = data.real
    else:
        data = np.ones(rows.size)
    matrix = sparse.coo_matrix((data, (rows, cols)), shape=(m2, m2)).tocsr()
    return SparseOperator(matrix, symmetric=False, name="non_backtracking")


def nb_factorization(g: MarkedGraph) -> Tuple[SparseOperator, SparseOperator]:
    """(B̄, D) with B̄ unweighted and D = diag(ξ), so that B = B̄·D."""
    if g.marks is None:
        raise ValueError("Factorization requires marks")
    plain = non_backtracking(g, weighted=False)
    marks = g.marks if np.any(g.marks.imag) else g.marks.real
    diagonal = SparseOperator(sparse.diags(marks, format="csr"), name="marks")
    return plain, diagonal


def divergence(g: MarkedGraph, phi: np.ndarray) -> np.ndarray:
    """φ̂(x) = Σ_{e: e₊ = x} φ(e)."""
    phi = np.asarray(phi)
    out = np.zeros(g.vertex_count, dtype=np.result_type(phi, np.float64))
    np.add.at(out, g.target, phi)
    return out


OPERATORS = {
    "adjacency": adjacency,
    "weighted": weighted_adjacency,
    "degree": degree_diagonal,
    "nb": non_backtracking,
}
