import numpy as np
import pytest

from glim.errors import BudgetExceededError
from glim.generators import (
    box_center,
    cycle_graph,
    erdos_renyi,
    galton_watson_ball_law,
    galton_watson_poisson,
    gw_extinction_probability,
    lift_projection,
    n_lift,
    random_regular,
    schreier_graph,
    universal_cover_ball,
    zd_box_percolation,
)
from glim.models.balls import canonical_class, regular_tree_ball
from glim.models.graph import MarkedGraph, count_short_cycles
from glim.models.representations import PermutationRep
from glim.models.words import Word, free_generators
from tests.utils import RANDOM_SEED, bouquet, small_graph, theta_graph


def test_random_regular_pairing():
    g = random_regular(100, 4, RANDOM_SEED)
    assert g.vertex_count == 100
    assert np.all(g.degrees() == 4)
    assert g.same_as(random_regular(100, 4, RANDOM_SEED))
    assert not g.same_as(random_regular(100, 4, RANDOM_SEED + 1))


def test_random_regular_permutation_model():
    g = random_regular(60, 4, RANDOM_SEED, model="permutation")
    assert np.all(g.degrees() == 4)
    assert g.labels is not None


def test_random_regular_parity_errors():
    with pytest.raises(ValueError, match=r"pairing model requires n\*d even"):
        random_regular(5, 3, RANDOM_SEED)
    with pytest.raises(ValueError, match="permutation model requires d even"):
        random_regular(10, 3, RANDOM_SEED, model="permutation")
    with pytest.raises(ValueError, match="Invalid regular model"):
        random_regular(10, 4, RANDOM_SEED, model="bogus")


def test_simple_pairing_has_no_loops_or_multi_edges():
    g = random_regular(50, 3, RANDOM_SEED, simple=True)
    cycles = count_short_cycles(g)
    assert cycles["loops"] == 0
    assert cycles["parallel"] == 0


def test_erdos_renyi_mean_degree():
    g = erdos_renyi(2000, 4.0, RANDOM_SEED)
    assert g.vertex_count == 2000
    assert 2 * g.num_edges / 2000 == pytest.approx(4.0, abs=0.4)
    cycles = count_short_cycles(g)
    assert cycles["loops"] == 0 and cycles["parallel"] == 0
    with pytest.raises(ValueError, match="Invalid mean degree"):
        erdos_renyi(10, 0, RANDOM_SEED)


def test_erdos_renyi_dense_limit_is_complete():
    g = erdos_renyi(6, 10.0, RANDOM_SEED)
    assert g.num_edges == 15


def test_zd_box_percolation():
    full = zd_box_percolation(2, 3, 1.0, RANDOM_SEED)
    assert full.vertex_count == 49
    assert full.num_edges == 2 * 7 * 6
    assert full.degrees()[box_center(2, 3)] == 4
    assert box_center(2, 3) == 24

    empty = zd_box_percolation(2, 3, 0.0, RANDOM_SEED)
    assert empty.num_edges == 0

    with pytest.raises(BudgetExceededError):
        zd_box_percolation(3, 1000, 0.5, RANDOM_SEED)
    with pytest.raises(ValueError, match="Invalid percolation parameter"):
        zd_box_percolation(2, 3, 1.5, RANDOM_SEED)


def test_zd_box_percolation_marks():
    g = zd_box_percolation(
        1,
        5,
        1.0,
        RANDOM_SEED,
        mark_sampler=lambda rng, size: rng.choice([-1.0, 1.0], size=size),
    )
    assert g.mark_symmetry() == "equal"
    assert set(np.abs(g.marks).tolist()) == {1.0}


def test_galton_watson_tree():
    tree = galton_watson_poisson(2.0, 3, RANDOM_SEED)
    assert tree.root == 0
    assert tree.graph.num_edges == tree.size - 1
    assert tree.distance_labels.max() <= 3
    assert np.all(tree.boundary == (tree.distance_labels == 3))


def test_galton_watson_ball_law_is_a_distribution():
    law = galton_watson_ball_law(1.0, 1, 500, RANDOM_SEED)
    assert law.total == 500
    assert sum(law.weights.values()) == pytest.approx(1.0)
    single = canonical_class(regular_tree_ball(1, 0))
    # P(no child) = e^{-1}
    assert law.probability(single) == pytest.approx(np.exp(-1), abs=0.07)


def test_gw_extinction_probability():
    assert gw_extinction_probability(0.5) == 1.0
    q = gw_extinction_probability(2.0)
    assert q == pytest.approx(np.exp(2.0 * (q - 1)), abs=1e-12)
    assert q == pytest.approx(0.2031878, abs=1e-6)


def test_schreier_graph():
    rep = PermutationRep.cycle(5)
    g = schreier_graph(rep, free_generators(1))
    assert g.vertex_count == 5
    assert np.all(g.degrees() == 2)
    assert g.is_connected()
    assert set(g.labels) == {Word((1,)), Word((-1,))}

    with pytest.raises(ValueError, match="not symmetric"):
        schreier_graph(rep, [Word((1,))])


def test_schreier_graph_identity_gives_loops():
    rep = PermutationRep.identity(3, 1)
    g = schreier_graph(rep, ["e", "e"])
    assert count_short_cycles(g)["loops"] == 6


def test_n_lift():
    base = theta_graph()
    rep = PermutationRep.uniform(10, 3, RANDOM_SEED)
    lift = n_lift(base, rep)
    assert lift.vertex_count == 20
    assert lift.num_edges == 30
    assert np.all(lift.degrees() == 3)

    vertices, half_edges = lift_projection(base, 10)
    assert np.array_equal(vertices[lift.source], base.source[half_edges])
    assert np.array_equal(vertices[lift.target], base.target[half_edges])

    with pytest.raises(ValueError, match="Permutation count mismatch"):
        n_lift(base, PermutationRep.uniform(10, 2, RANDOM_SEED))


def test_n_lift_keeps_asymmetric_marks():
    base = MarkedGraph(
        2,
        np.array([0, 1, 0, 1]),
        np.array([1, 0, 3, 2]),
        marks=np.array([2.0, 3j, 1.0, -1.0]),
        labels=("a", "A", "b", "B"),
    )
    assert base.mark_symmetry() is None
    lift = n_lift(base, PermutationRep.uniform(5, 2, RANDOM_SEED))
    _, half_edges = lift_projection(base, 5)
    assert np.array_equal(lift.marks, base.marks[half_edges])
    assert lift.labels == tuple(base.labels[h] for h in half_edges)
    assert lift.mark_symmetry() is None


def test_universal_cover_ball():
    theta = universal_cover_ball(theta_graph(), 0, 2)
    assert theta.size == 1 + 3 + 6
    assert theta.graph.num_edges == theta.size - 1
    assert set(theta.vertex_map[theta.distance_labels == 1].tolist()) == {1}

    # the cover of a bouquet of two loops is the 4-regular tree
    cover = universal_cover_ball(bouquet(2), 0, 2)
    assert canonical_class(cover) == canonical_class(regular_tree_ball(4, 2))

    with pytest.raises(ValueError, match="connected base graph"):
        universal_cover_ball(small_graph(), 0, 1)


def test_cycle_graph():
    assert cycle_graph(1).adjacency_csr.toarray().tolist() == [[2]]
    assert count_short_cycles(cycle_graph(2))["parallel"] == 1
    assert np.all(cycle_graph(7).degrees() == 2)
