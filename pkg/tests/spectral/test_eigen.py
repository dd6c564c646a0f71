import numpy as np
import pytest

from glim.errors import BudgetExceededError
from glim.generators import cycle_graph, random_regular
from glim.models.balls import ball, regular_tree_ball
from glim.models.graph import build_graph
from glim.spectral.eigen import (
    average_root_moments,
    eig_dense_nonsymmetric,
    eig_dense_symmetric,
    eig_extreme_symmetric,
    eig_top_nonsymmetric,
    esd,
    esd_moments,
    nullity,
    second_eigenvalue,
    sort_by_modulus,
    spectral_moments,
)
from glim.spectral.laws import kesten_mckay_moments
from glim.spectral.operators import adjacency, non_backtracking
from tests.utils import RANDOM_SEED, bouquet, complete_graph, path_graph, small_graph


def test_dense_symmetric_cycle_spectrum():
    report = eig_dense_symmetric(adjacency(cycle_graph(6)), bins=10, moments=4)
    assert np.allclose(report.eigenvalues, [-2, -1, -1, 1, 1, 2])
    assert report.extremes == pytest.approx((2.0, 1.0, -2.0))
    assert report.histogram.masses.sum() == pytest.approx(1.0)
    assert report.moments == pytest.approx([1, 0, 2, 0, 6])
    assert report.is_real

    data = report.to_dict()
    assert data["schema"] == "glim.spectrum/1"
    assert data["dim"] == 6


def test_dense_nonsymmetric_is_sorted_by_modulus():
    report = eig_dense_nonsymmetric(non_backtracking(complete_graph(4)))
    values = report.eigenvalues
    assert values.size == 12
    assert not report.is_real
    assert abs(values[0] - 2.0) < 1e-9
    assert np.all(np.diff(np.abs(values)) <= 1e-9)

    with pytest.raises(BudgetExceededError):
        eig_dense_nonsymmetric(non_backtracking(complete_graph(4)), max_dim=10)


def test_sort_by_modulus_breaks_ties_by_real_part():
    ordered = sort_by_modulus(np.array([-1.0 + 0j, 1j, 1.0 + 0j, 0.5 + 0j]))
    assert ordered.tolist() == [1.0 + 0j, 1j, -1.0 + 0j, 0.5 + 0j]


def test_extreme_symmetric_dense_path_deflates_constants():
    a = adjacency(cycle_graph(10))
    top = eig_extreme_symmetric(a, 1, "top", np.ones(10))
    bottom = eig_extreme_symmetric(a, 1, "bottom", np.ones(10))
    assert top[0] == pytest.approx(2 * np.cos(2 * np.pi / 10))
    assert bottom[0] == pytest.approx(-2.0)
    assert second_eigenvalue(a) == pytest.approx(2.0)


def test_extreme_symmetric_lanczos_path():
    g = random_regular(500, 4, RANDOM_SEED)
    a = adjacency(g)
    top = eig_extreme_symmetric(a, 2, "top")
    assert top[0] == pytest.approx(4.0, abs=1e-6)
    assert top[0] >= top[1]
    dense = np.linalg.eigvalsh(a.toarray())
    assert second_eigenvalue(a) == pytest.approx(max(dense[-2], -dense[0]), abs=1e-6)


def test_extreme_symmetric_argument_checks():
    a = adjacency(cycle_graph(6))
    with pytest.raises(ValueError, match="Invalid which"):
        eig_extreme_symmetric(a, 1, "middle")
    with pytest.raises(ValueError, match="1 <= k"):
        eig_extreme_symmetric(a, 0)


def test_top_nonsymmetric_perron_value():
    b = non_backtracking(random_regular(300, 4, RANDOM_SEED))
    values = eig_top_nonsymmetric(b, 2)
    assert abs(values[0]) == pytest.approx(3.0, rel=1e-6)
    assert abs(values[1]) <= abs(values[0]) + 1e-9


def test_top_nonsymmetric_with_a_wider_krylov_space():
    b = non_backtracking(random_regular(300, 4, RANDOM_SEED))
    wider = eig_top_nonsymmetric(b, 2, ncv=64)
    assert abs(wider[0]) == pytest.approx(3.0, rel=1e-6)
    assert abs(wider[1]) <= 3.0 + 1e-9


def test_esd_and_moments():
    values = np.array([-1.0, 0.0, 0.0, 1.0])
    hist = esd(values, bins=4)
    assert hist.masses.sum() == pytest.approx(1.0)
    assert esd_moments(values, 2) == pytest.approx([1.0, 0.0, 0.5])
    with pytest.raises(ValueError, match="real spectrum"):
        esd(np.array([1j, 2.0]))


def test_spectral_moments_count_closed_walks():
    assert spectral_moments(cycle_graph(6), K=4) == [1, 0, 2, 0, 6]
    assert spectral_moments(bouquet(1), K=2) == [1, 2, 4]


def test_spectral_moments_of_tree_ball_match_kesten_mckay():
    tree = regular_tree_ball(4, 3)
    assert spectral_moments(tree, K=6) == kesten_mckay_moments(4, 6)
    with pytest.raises(ValueError, match="exact range"):
        spectral_moments(tree, K=8)
    with pytest.raises(ValueError, match="only at its root"):
        spectral_moments(tree, v=1, K=2)


def test_spectral_moments_of_a_ball_equal_graph_moments():
    g = random_regular(200, 3, RANDOM_SEED)
    b = ball(g, 7, 3)
    assert spectral_moments(b, K=7) == spectral_moments(g, v=7, K=7)


def test_average_root_moments_is_the_esd_moment():
    g = small_graph()
    values = np.linalg.eigvalsh(adjacency(g).toarray())
    assert average_root_moments(g, 4) == pytest.approx(esd_moments(values, 4))
    assert average_root_moments(cycle_graph(6), 2) == pytest.approx([1.0, 0.0, 2.0])


def test_nullity_by_leaf_removal():
    assert nullity(path_graph(5)) == 1
    assert nullity(path_graph(4)) == 0
    star = build_graph(4, [(0, 1), (0, 2), (0, 3)])
    assert nullity(star) == 2
    assert nullity(complete_graph(2)) == 0


def test_nullity_of_cores():
    c4 = cycle_graph(4)
    assert nullity(c4) == 2
    assert nullity(c4, exact_limit=0) == 2
    assert nullity(bouquet(1)) == 0
    assert nullity(complete_graph(4)) == 0


def test_nullity_matches_dense_rank():
    g = random_regular(60, 3, RANDOM_SEED)
    dense = g.adjacency_csr.toarray()
    assert nullity(g) == 60 - np.linalg.matrix_rank(dense)
