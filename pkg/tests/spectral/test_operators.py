import numpy as np
import pytest
from scipy import sparse

from glim.generators import cycle_graph, random_regular
from glim.models.graph import build_graph
from glim.spectral.operators import (
    SparseOperator,
    adjacency,
    adjacency_kernel,
    degree_diagonal,
    distance_kernel,
    divergence,
    identity_kernel,
    local_operator,
    nb_factorization,
    non_backtracking,
    weighted_adjacency,
)
from tests.utils import RANDOM_SEED, bouquet, small_graph, theta_graph


def test_adjacency_is_symmetric_and_integer():
    op = adjacency(small_graph())
    assert op.symmetric
    assert op.dim == 6
    assert op.is_integer_valued()
    assert np.array_equal(op.toarray(), op.toarray().T)
    assert np.allclose(op.matvec(np.ones(6)), small_graph().degrees())


def test_flagged_symmetric_operator_is_checked():
    with pytest.raises(ValueError, match="flagged symmetric"):
        SparseOperator(
            sparse.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]])), symmetric=True
        )
    with pytest.raises(ValueError, match="must be square"):
        SparseOperator(sparse.csr_matrix(np.zeros((2, 3))))


def test_weighted_adjacency_symmetry_follows_marks():
    hermitian = weighted_adjacency(build_graph(2, [(0, 1, 1j)], symmetry="conjugate"))
    assert hermitian.symmetric
    assert hermitian.toarray()[1, 0] == 1j
    assert hermitian.toarray()[0, 1] == -1j

    skew = weighted_adjacency(build_graph(2, [(0, 1, 1j)], symmetry="equal"))
    assert not skew.symmetric

    real = weighted_adjacency(build_graph(3, [(0, 1, 2.0), (1, 2, -1.0)]))
    assert real.symmetric
    assert real.toarray()[1, 0] == 2.0


def test_degree_diagonal():
    expected = np.diag([3, 2, 2, 3, 1, 1])
    assert np.allclose(degree_diagonal(small_graph()).toarray(), expected)


def test_non_backtracking_on_a_cycle_is_a_permutation():
    b = non_backtracking(cycle_graph(5))
    assert b.dim == 10
    dense = b.toarray()
    assert np.all(dense.sum(axis=0) == 1)
    assert np.all(dense.sum(axis=1) == 1)
    values = np.linalg.eigvals(dense)
    assert np.allclose(np.abs(values), 1.0)
    assert np.allclose(values**5, 1.0)


def test_non_backtracking_row_sums_on_regular_graphs():
    g = random_regular(30, 4, RANDOM_SEED)
    dense = non_backtracking(g).toarray()
    assert np.all(dense.sum(axis=1) == 3)
    assert np.all(dense.sum(axis=0) == 3)


def test_non_backtracking_never_reverses():
    g = theta_graph()
    dense = non_backtracking(g).toarray()
    for e in range(g.num_half_edges):
        assert dense[int(g.partner[e]), e] == 0
    # a loop continues into itself
    assert np.array_equal(non_backtracking(bouquet(1)).toarray(), np.eye(2))


def test_weighted_non_backtracking_factorization():
    g = build_graph(3, [(0, 1, 2.0), (1, 2, -1.0), (2, 0, 0.5)])
    plain, marks = nb_factorization(g)
    weighted = non_backtracking(g, weighted=True)
    assert np.allclose(weighted.toarray(), (plain @ marks).toarray())
    with pytest.raises(ValueError, match="requires marks"):
        non_backtracking(small_graph(), weighted=True)


def test_divergence_sums_incoming_half_edges():
    g = small_graph()
    assert np.allclose(divergence(g, np.ones(g.num_half_edges)), g.degrees())
    phi = np.zeros(g.num_half_edges)
    phi[0] = 1.0
    expected = np.zeros(6)
    expected[g.target[0]] = 1.0
    assert np.allclose(divergence(g, phi), expected)


@pytest.mark.parametrize(
    "g", [small_graph(), theta_graph(), bouquet(1), cycle_graph(6)]
)
def test_adjacency_kernel_reproduces_adjacency(g):
    local = local_operator(g, adjacency_kernel())
    assert np.allclose(local.toarray(), adjacency(g).toarray())
    canonical = local_operator(g, adjacency_kernel(), canonical=True)
    assert np.allclose(canonical.toarray(), adjacency(g).toarray())


def test_distance_and_identity_kernels():
    g = cycle_graph(6)
    two = local_operator(g, distance_kernel(2)).toarray()
    assert np.all(two.sum(axis=0) == 2)
    assert two[2, 0] == 1 and two[0, 0] == 0
    assert np.allclose(local_operator(g, identity_kernel()).toarray(), np.eye(6))
    assert np.allclose(local_operator(g, distance_kernel(0)).toarray(), np.eye(6))


def test_kernel_range_must_fit_in_the_ball():
    with pytest.raises(ValueError, match="exceeds ball radius"):
        local_operator(cycle_graph(6), distance_kernel(2), radius=1)
