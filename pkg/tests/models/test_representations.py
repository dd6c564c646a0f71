import numpy as np
import pytest

from glim.generators import n_lift, schreier_graph
from glim.models.algebra import AlgebraElement
from glim.models.representations import (
    PermutationRep,
    character_fraction,
    character_fractions,
    cover_element,
    evaluate_rep,
    fiber_constant_basis,
    matrix_coeff_operator,
    permutation_matrix,
)
from glim.models.words import Word, enumerate_reduced_words, free_generators
from tests.utils import RANDOM_SEED, theta_graph


def test_non_bijection_is_rejected():
    with pytest.raises(ValueError, match="not a bijection"):
        PermutationRep(3, [[0, 0, 1]])


def test_uniform_is_reproducible():
    a = PermutationRep.uniform(50, 2, RANDOM_SEED)
    b = PermutationRep.uniform(50, 2, RANDOM_SEED)
    assert a == b
    assert a.d == 2
    assert a != PermutationRep.uniform(50, 2, RANDOM_SEED + 1)


def test_word_permutation_is_a_homomorphism():
    rep = PermutationRep.uniform(20, 2, RANDOM_SEED)
    u, w = Word((1, -2)), Word((2, 2, 1))
    assert np.array_equal(
        rep.word_permutation(u * w), rep.word_permutation(u)[rep.word_permutation(w)]
    )
    assert np.array_equal(rep.word_permutation(Word((1, -1))), np.arange(20))
    assert np.array_equal(rep.inverse_perms[0][rep.perms[0]], np.arange(20))


def test_permutation_matrix_convention():
    sigma = np.array([1, 2, 0])
    p = permutation_matrix(sigma).toarray()
    x = np.array([1.0, 2.0, 3.0])
    # (P x)[σ(i)] = x[i]
    assert np.array_equal((p @ x)[sigma], x)


def test_cycle_rep_characters():
    rep = PermutationRep.cycle(5)
    assert rep.word_permutation("1").tolist() == [1, 2, 3, 4, 0]
    assert character_fraction(rep, "1") == 0.0
    assert character_fraction(rep, "1.1.1.1.1") == 1.0
    assert character_fraction(PermutationRep.identity(4, 2), "1.-2") == 1.0
    with pytest.raises(ValueError, match="nonempty reduced word"):
        character_fraction(rep, "e")


def test_character_fractions_enumerates_reduced_words():
    rep = PermutationRep.uniform(30, 2, RANDOM_SEED)
    results = list(character_fractions(rep, 2))
    assert len(results) == 4 + 12
    for w, fraction in results:
        assert fraction == character_fraction(rep, w)


def test_evaluate_rep_equals_schreier_adjacency():
    rep = PermutationRep.uniform(40, 2, RANDOM_SEED)
    matrix = evaluate_rep(AlgebraElement.adjacency(2), rep).toarray()
    schreier = schreier_graph(rep, free_generators(2)).adjacency_csr.toarray()
    assert np.allclose(matrix, schreier)
    assert np.allclose(matrix, matrix.T)
    assert np.allclose(matrix.sum(axis=0), 4)


def test_evaluate_rep_rejects_other_rank():
    with pytest.raises(ValueError, match="Generator counts differ"):
        evaluate_rep(AlgebraElement.adjacency(3), PermutationRep.cycle(4, 2))


def test_cover_element_evaluates_to_lift_adjacency():
    base = theta_graph()
    rep = PermutationRep.uniform(7, base.num_edges, RANDOM_SEED)
    lifted = evaluate_rep(cover_element(base), rep).toarray()
    assert np.allclose(lifted, n_lift(base, rep).adjacency_csr.toarray())


def test_matrix_coeff_operator_blocks():
    rep = PermutationRep.cycle(3, 1)
    zero = np.zeros((2, 2))
    one = np.eye(2)
    operator = matrix_coeff_operator([one, zero, zero], rep).toarray()
    assert np.allclose(operator, np.eye(6))
    with pytest.raises(ValueError, match="Expected 3 blocks"):
        matrix_coeff_operator([one], rep)


def test_fiber_constant_basis_is_orthonormal():
    q = fiber_constant_basis(2, 3).toarray()
    assert q.shape == (6, 2)
    assert np.allclose(q.T @ q, np.eye(2))
    assert np.allclose(q[:3, 0], 1 / np.sqrt(3))


def random_element(rng, d, max_length, terms):
    words = list(enumerate_reduced_words(d, max_length))
    chosen = rng.choice(len(words), size=terms, replace=False)
    values = rng.normal(size=terms) + 1j * rng.normal(size=terms)
    return AlgebraElement(d, {words[i]: complex(c) for i, c in zip(chosen, values)})


@pytest.mark.parametrize("n", [1, 7, 20, 50])
def test_evaluate_rep_is_a_star_homomorphism(n):
    rng = np.random.default_rng(RANDOM_SEED + n)
    rep = PermutationRep.uniform(n, 2, RANDOM_SEED + n)
    for _ in range(5):
        a = random_element(rng, 2, 3, 8)
        b = random_element(rng, 2, 3, 8)
        rho_a = evaluate_rep(a, rep).toarray()
        rho_b = evaluate_rep(b, rep).toarray()
        assert np.allclose(evaluate_rep(a * b, rep).toarray(), rho_a @ rho_b)
        assert np.allclose(evaluate_rep(a + b, rep).toarray(), rho_a + rho_b)
        assert np.allclose(evaluate_rep(a.adjoint(), rep).toarray(), rho_a.conj().T)


def test_matrix_coeff_operator_on_fiber_constant_vectors():
    rng = np.random.default_rng(RANDOM_SEED)
    for n, d, k in [(5, 1, 2), (12, 2, 3), (30, 3, 2)]:
        rep = PermutationRep.uniform(n, d, RANDOM_SEED + n)
        blocks = [
            rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
            for _ in range(2 * d + 1)
        ]
        operator = matrix_coeff_operator(blocks, rep).toarray()
        q = fiber_constant_basis(k, n).toarray()
        total = sum(blocks)
        assert np.allclose(operator @ q, q @ total)
        assert np.allclose(operator.conj().T @ q, q @ total.conj().T)
