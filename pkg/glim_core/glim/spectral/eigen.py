"""Eigensolvers, empirical spectral distributions and spectral moments."""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as splinalg

from glim.errors import BudgetExceededError, EigensolverError
from glim.models.balls import RootedBall
from glim.models.graph import MarkedGraph
from glim.spectral.operators import (
    LocalKernel,
    OperatorLike,
    SparseOperator,
    adjacency,
    as_matrix,
    local_operator,
)

logger = logging.getLogger(__name__)

DENSE_SYMMETRIC_LIMIT = 5000
DENSE_NONSYMMETRIC_LIMIT = 400
MAX_ITERATIVE_K = 8
RESIDUAL_TOL = 1e-8
MAX_ITERATIONS = 10**4
HISTOGRAM_BINS = 100


@dataclass
class Histogram:
    edges: np.ndarray
    masses: np.ndarray

    def to_dict(self) -> dict:
        return {"edges": self.edges.tolist(), "masses": self.masses.tolist()}


@dataclass
class SpectrumReport:
    """Eigenvalues with their histogram, moments and extremes.

    ``extremes`` is (λ₁, λ₂, λ_min) for real spectra, ordered decreasingly,
    and the two largest moduli plus the smallest modulus for complex ones.
    """

    eigenvalues: np.ndarray
    histogram: Optional[Histogram] = None
    moments: List[float] = field(default_factory=list)
    extremes: Tuple = ()
    method: str = "dense"
    notes: List[str] = field(default_factory=list)

    @property
    def is_real(self) -> bool:
        return not np.iscomplexobj(self.eigenvalues)

    def to_dict(self) -> dict:
        if self.is_real:
            values = self.eigenvalues.tolist()
            extremes = [float(x) for x in self.extremes]
            moments = [float(x) for x in self.moments]
        else:
            values = [[z.real, z.imag] for z in self.eigenvalues.tolist()]
            extremes = [[complex(z).real, complex(z).imag] for z in self.extremes]
            moments = [[complex(z).real, complex(z).imag] for z in self.moments]
        return {
            "schema": "glim.spectrum/1",
            "method": self.method,
            "dim": int(self.eigenvalues.size),
            "eigenvalues": values,
            "histogram": None if self.histogram is None else self.histogram.to_dict(),
            "moments": moments,
            "extremes": extremes,
            "notes": self.notes,
        }


def _dense(a: OperatorLike) -> np.ndarray:
    matrix = as_matrix(a)
    return matrix.toarray() if sparse.issparse(matrix) else np.asarray(matrix)


def _real_extremes(values: np.ndarray) -> Tuple[float, float, float]:
    ordered = np.sort(values)[::-1]
    second = ordered[1] if ordered.size > 1 else ordered[0]
    return float(ordered[0]), float(second), float(ordered[-1])


def _complex_extremes(values: np.ndarray) -> Tuple[complex, complex, complex]:
    ordered = sort_by_modulus(values)
    second = ordered[1] if ordered.size > 1 else ordered[0]
    return complex(ordered[0]), complex(second), complex(ordered[-1])


def sort_by_modulus(values: np.ndarray) -> np.ndarray:
    """Decreasing |λ|, ties broken by decreasing real part then imaginary part."""
    values = np.asarray(values)
    order = np.lexsort((-values.imag, -values.real, -np.round(np.abs(values), 12)))
    return values[order]


# ===== Dense paths
def eig_dense_symmetric(
    a: OperatorLike, bins: int = HISTOGRAM_BINS, moments: int = 6
) -> SpectrumReport:
    """All eigenvalues of a self-adjoint operator, sorted increasingly."""
    dense = _dense(a)
    if dense.shape[0] > DENSE_SYMMETRIC_LIMIT:
        raise BudgetExceededError(
            f"Dense symmetric solve limited to dim {DENSE_SYMMETRIC_LIMIT}",
            DENSE_SYMMETRIC_LIMIT,
            dense.shape[0],
        )
    values = np.linalg.eigvalsh(dense)
    if values.size == 0:
        return SpectrumReport(values, method="dense-symmetric")
    return SpectrumReport(
        eigenvalues=values,
        histogram=esd(values, bins),
        moments=esd_moments(values, moments),
        extremes=_real_extremes(values),
        method="dense-symmetric",
    )


def eig_dense_nonsymmetric(
    b: OperatorLike, max_dim: int = DENSE_NONSYMMETRIC_LIMIT, moments: int = 6
) -> SpectrumReport:
    """All eigenvalues of a general operator, sorted by decreasing modulus."""
    dense = _dense(b)
    if dense.shape[0] > max_dim:
        raise BudgetExceededError(
            f"Dense nonsymmetric solve limited to dim {max_dim}",
            max_dim,
            dense.shape[0],
        )
    values = sort_by_modulus(np.linalg.eigvals(dense).astype(np.complex128))
    if values.size == 0:
        return SpectrumReport(values, method="dense-nonsymmetric")
    return SpectrumReport(
        eigenvalues=values,
        moments=esd_moments(values, moments),
        extremes=_complex_extremes(values),
        method="dense-nonsymmetric",
    )


# ===== Iterative paths
def _gershgorin_bound(matrix) -> float:
    if not matrix.shape[0]:
        return 0.0
    if sparse.issparse(matrix):
        return float(np.max(np.asarray(abs(matrix).sum(axis=1))))
    return float(np.max(np.sum(np.abs(matrix), axis=1)))


def _orthonormal(basis: Optional[np.ndarray], n: int) -> Optional[np.ndarray]:
    if basis is None:
        return None
    dtype = np.complex128 if np.iscomplexobj(basis) else np.float64
    basis = np.asarray(basis, dtype=dtype)
    if basis.ndim == 1:
        basis = basis[:, None]
    if basis.shape[0] != n:
        raise ValueError(f"Deflation basis has {basis.shape[0]} rows, expected {n}")
    q, _ = np.linalg.qr(basis)
    return q


def eig_extreme_symmetric(
    a: OperatorLike,
    k: int = 1,
    which: str = "top",
    deflation_basis: Optional[np.ndarray] = None,
    tol: float = RESIDUAL_TOL,
    maxiter: int = MAX_ITERATIONS,
) -> np.ndarray:
    """k extreme eigenvalues of a self-adjoint operator by implicitly restarted Lanczos.

    The span of ``deflation_basis`` is projected out: the solver works with
    P A P + σ(1 - P), σ beyond the spectrum on the side opposite to ``which``.

    Returns:
        np.ndarray: decreasing for which="top", increasing for which="bottom".

    Raises:
        EigensolverError: residual above ``tol`` after ``maxiter`` iterations.
    """
    if which not in ("top", "bottom"):
        raise ValueError(f"Invalid which={which!r}")
    if not 1 <= k <= MAX_ITERATIVE_K:
        raise ValueError(f"Iterative path requires 1 <= k <= {MAX_ITERATIVE_K}")
    matrix = as_matrix(a)
    n = matrix.shape[0]
    q = _orthonormal(deflation_basis, n)
    p = 0 if q is None else q.shape[1]
    if n - p < k:
        raise ValueError(f"Only {n - p} eigenvalues remain after deflation")
    bound = _gershgorin_bound(matrix) + 1.0
    shift = -bound if which == "top" else bound
    dtype = np.result_type(matrix.dtype, np.float64 if q is None else q.dtype)

    def apply(x):
        x = np.asarray(x).reshape(-1)
        if q is None:
            return matrix @ x
        coeffs = q.conj().T @ x
        y = x - q @ coeffs
        y = matrix @ y
        y = y - q @ (q.conj().T @ y)
        return y + shift * (q @ coeffs)

    if n <= 2 * k + 20:
        dense = np.column_stack([apply(col) for col in np.eye(n, dtype=dtype)])
        values = np.linalg.eigvalsh((dense + dense.conj().T) / 2)
        if q is not None:
            values = values[values * np.sign(-shift) > -bound + 0.5]
        picked = values[::-1][:k] if which == "top" else values[:k]
        return picked

    operator = splinalg.LinearOperator((n, n), matvec=apply, dtype=dtype)
    target = "LA" if which == "top" else "SA"
    try:
        values, vectors = splinalg.eigsh(
            operator, k=k, which=target, tol=tol / 10, maxiter=maxiter
        )
    except splinalg.ArpackNoConvergence as err:
        partial = np.asarray(err.eigenvalues)
        raise EigensolverError(
            f"Lanczos did not converge for k={k} after {maxiter} iterations",
            best_residual=_best_residual(apply, partial, err.eigenvectors),
            eigenvalues=partial,
        ) from err
    residual = _best_residual(apply, values, vectors)
    scale = max(1.0, float(np.max(np.abs(values))))
    if residual > tol * scale:
        raise EigensolverError(
            f"Lanczos residual {residual:.3g} above tolerance", residual, values
        )
    values = np.sort(values)
    return values[::-1] if which == "top" else values


def _best_residual(apply, values, vectors) -> float:
    values = np.asarray(values)
    if values.size == 0 or vectors is None:
        return float("inf")
    residuals = [
        np.linalg.norm(apply(vectors[:, i]) - values[i] * vectors[:, i])
        / max(np.linalg.norm(vectors[:, i]), 1e-300)
        for i in range(values.size)
    ]
    return float(max(residuals))


def second_eigenvalue(
    a: OperatorLike, deflation_basis: Optional[np.ndarray] = None
) -> float:
    """max(μ₂, -μ_n) after projecting out ``deflation_basis`` (default: constants)."""
    n = as_matrix(a).shape[0]
    basis = np.ones(n) if deflation_basis is None else deflation_basis
    top = eig_extreme_symmetric(a, 1, "top", basis)[0]
    bottom = eig_extreme_symmetric(a, 1, "bottom", basis)[0]
    return float(max(top, -bottom))


def eig_top_nonsymmetric(
    b: OperatorLike,
    k: int = 2,
    tol: float = RESIDUAL_TOL,
    maxiter: int = MAX_ITERATIONS,
    ncv: Optional[int] = None,
) -> np.ndarray:
    """k largest-modulus eigenvalues, via implicitly restarted Arnoldi.

    Small operators (dim <= 400 or k close to dim) use the dense QR path.
    ``ncv`` is the Krylov dimension; a larger one helps when many
    eigenvalues share the top modulus.
    """
    if not 1 <= k <= MAX_ITERATIVE_K:
        raise ValueError(f"Iterative path requires 1 <= k <= {MAX_ITERATIVE_K}")
    matrix = as_matrix(b)
    n = matrix.shape[0]
    if n <= DENSE_NONSYMMETRIC_LIMIT or k >= n - 1:
        return eig_dense_nonsymmetric(matrix, max_dim=max(n, 1)).eigenvalues[:k]
    # a few extra Ritz values keep complex pairs together
    wanted = min(k + 2, n - 2)
    try:
        values, vectors = splinalg.eigs(
            matrix.astype(np.complex128) if np.iscomplexobj(matrix.data) else matrix,
            k=wanted,
            which="LM",
            tol=tol / 10,
            maxiter=maxiter,
            ncv=None if ncv is None else min(max(ncv, 2 * wanted + 1), n),
        )
    except splinalg.ArpackNoConvergence as err:
        partial = np.asarray(err.eigenvalues)
        apply = lambda x: matrix @ x  # noqa: E731
        raise EigensolverError(
            f"Arnoldi did not converge for k={k} after {maxiter} iterations",
            best_residual=_best_residual(apply, partial, err.eigenvectors),
            eigenvalues=partial,
        ) from err
    order = np.argsort(-np.abs(values), kind="stable")
    values, vectors = values[order][:k], vectors[:, order][:, :k]
    residual = _best_residual(lambda x: matrix @ x, values, vectors)
    scale = max(1.0, float(np.max(np.abs(values))))
    if residual > tol * scale:
        raise EigensolverError(
            f"Arnoldi residual {residual:.3g} above tolerance", residual, values
        )
    return sort_by_modulus(values)


# ===== Distributions and moments
def esd(
    values: Union[SpectrumReport, Sequence[float]],
    bins: int = HISTOGRAM_BINS,
    value_range: Optional[Tuple[float, float]] = None,
) -> Histogram:
    """Histogram of the empirical spectral distribution (masses sum to 1)."""
    if isinstance(values, SpectrumReport):
        values = values.eigenvalues
    values = np.real_if_close(np.asarray(values))
    if np.iscomplexobj(values):
        raise ValueError("Histogram requires a real spectrum")
    if value_range is None:
        low, high = float(np.min(values)), float(np.max(values))
        if low == high:
            low, high = low - 0.5, high + 0.5
        value_range = (low, high)
    counts, edges = np.histogram(values, bins=bins, range=value_range)
    return Histogram(edges, counts / values.size)


def esd_moments(values: Union[SpectrumReport, Sequence], K: int) -> list:
    """(1/n) Σ λ^k for k = 0..K."""
    if isinstance(values, SpectrumReport):
        values = values.eigenvalues
    values = np.asarray(values)
    out = []
    power = np.ones_like(values)
    for _ in range(K + 1):
        mean = power.mean() if values.size else 0.0
        out.append(complex(mean) if np.iscomplexobj(values) else float(mean))
        power = power * values
    return out


def _operator_for(g, kernel) -> SparseOperator:
    if isinstance(kernel, SparseOperator):
        return kernel
    if isinstance(kernel, LocalKernel):
        return local_operator(g, kernel)
    if kernel in (None, "adjacency"):
        return adjacency(g)
    raise ValueError(f"Invalid kernel {kernel!r}")


def spectral_moments(
    g: Union[MarkedGraph, RootedBall],
    kernel=None,
    v: int = 0,
    K: int = 6,
) -> list:
    """⟨δ_v, A^k δ_v⟩ for k = 0..K by repeated sparse products.

    Integer-valued operators are iterated in exact integer arithmetic. For a
    truncated ball, v must be its root and K <= 2·depth + 1, the range where
    closed walks from the root cannot reach past the truncation.
    """
    if isinstance(g, RootedBall):
        if v != g.root:
            raise ValueError("Moments of a truncated ball are exact only at its root")
        if g.boundary is not None and np.any(g.boundary) and K > 2 * g.radius + 1:
            raise ValueError(
                f"K={K} exceeds the exact range {2 * g.radius + 1} of the truncation"
            )
        g = g.graph
    op = _operator_for(g, kernel)
    matrix = op.matrix
    if op.is_integer_valued():
        if np.iscomplexobj(matrix.data):
            matrix = matrix.real
        matrix = matrix.astype(np.int64)
        x = np.zeros(op.dim, dtype=np.int64)
    else:
        x = np.zeros(op.dim, dtype=matrix.dtype)
    x[v] = 1
    out = []
    if x.dtype == np.int64:
        scalar = int
    elif np.iscomplexobj(x):
        scalar = complex
    else:
        scalar = float
    for _ in range(K + 1):
        out.append(scalar(x[v]))
        x = matrix @ x
    return out


def average_root_moments(g: MarkedGraph, K: int, kernel=None) -> list:
    """Mean over v of ⟨δ_v, A^k δ_v⟩, which equals the k-th ESD moment Tr A^k / n."""
    op = _operator_for(g, kernel)
    n = op.dim
    if n == 0:
        return [0.0] * (K + 1)
    x = np.eye(n, dtype=np.result_type(op.matrix.dtype, np.float64))
    out = []
    for _ in range(K + 1):
        trace = np.trace(x) / n
        out.append(complex(trace) if np.iscomplexobj(x) else float(trace))
        x = op.matrix @ x
    return out


# ===== Nullity
PRIMES = (2**31 - 1,)
EXACT_RANK_LIMIT = 2000


def _leaf_reduction(g: MarkedGraph) -> Tuple[List[int], int]:
    """Karp–Sipser leaf removal on the adjacency matrix.

    Removing a loop-free vertex with a single neighbour together with that
    neighbour lowers the rank by exactly 2; a vertex with no entries
    contributes 1 to the nullity. Returns (core vertices, nullity so far).
    """
    n = g.vertex_count
    neighbours = [dict() for _ in range(n)]
    loops = np.zeros(n, dtype=np.int64)
    for u, v, _ in g.edges():
        if u == v:
            loops[u] += 2
        else:
            neighbours[u][v] = neighbours[u].get(v, 0) + 1
            neighbours[v][u] = neighbours[v].get(u, 0) + 1
    alive = np.ones(n, dtype=bool)
    nullity = 0
    stack = [u for u in range(n) if loops[u] == 0 and len(neighbours[u]) <= 1]

    def remove(x):
        alive[x] = False
        for y in list(neighbours[x]):
            del neighbours[y][x]
            if alive[y] and loops[y] == 0 and len(neighbours[y]) <= 1:
                stack.append(y)
        neighbours[x].clear()

    while stack:
        u = stack.pop()
        if not alive[u] or loops[u] != 0:
            continue
        if len(neighbours[u]) == 0:
            alive[u] = False
            nullity += 1
        elif len(neighbours[u]) == 1:
            (w,) = neighbours[u]
            remove(u)
            remove(w)
    return np.flatnonzero(alive).tolist(), nullity


def _rank_mod_p(matrix: np.ndarray, p: int) -> int:
    m = np.array(matrix, dtype=np.int64) % p
    rows, cols = m.shape
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        nonzero = np.flatnonzero(m[rank:, c])
        if nonzero.size == 0:
            continue
        pivot = rank + int(nonzero[0])
        if pivot != rank:
            m[[rank, pivot]] = m[[pivot, rank]]
        inverse = pow(int(m[rank, c]), p - 2, p)
        m[rank, c:] = (m[rank, c:] * inverse) % p
        below = np.flatnonzero(m[rank + 1 :, c]) + rank + 1
        if below.size:
            factors = m[below, c][:, None]
            m[below, c:] = (m[below, c:] - (factors * m[rank, c:][None, :]) % p) % p
        rank += 1
    return rank


def nullity(
    g: MarkedGraph, exact_limit: int = EXACT_RANK_LIMIT, tol: float = 1e-9
) -> int:
    """dim ker A for the adjacency matrix of g.

    Leaf removal is exact; the remaining core is ranked modulo a large prime
    when it has at most ``exact_limit`` vertices, otherwise by counting
    eigenvalues above ``tol`` (relative to the spectral bound).
    """
    core, null = _leaf_reduction(g)
    if not core:
        return null
    block = g.adjacency_csr[core][:, core]
    size = len(core)
    if size <= exact_limit:
        dense = np.rint(block.toarray()).astype(np.int64)
        rank = max(_rank_mod_p(dense, p) for p in PRIMES)
        method = "modular"
    else:
        values = np.linalg.eigvalsh(block.toarray())
        scale = max(1.0, float(np.max(np.abs(values))))
        rank = int(np.count_nonzero(np.abs(values) > tol * scale))
        method = "eigenvalue threshold"
    logger.debug(f"nullity: core of {size} vertices ranked by {method}")
    return null + size - rank
