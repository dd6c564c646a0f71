"""Permutation representations of F_d and their action on the group algebra.

ρ(g_i) is the permutation ``perms[i-1]``; its matrix P has P[σ(x), x] = 1, so
P(σ)P(τ) = P(σ∘τ) and ρ(uw) = ρ(u)ρ(w).
"""
from dataclasses import dataclass
from functools import cached_property
from typing import Iterator, List, Sequence, Tuple, Union

import numpy as np
from scipy import sparse

from glim.models.algebra import AlgebraElement, MatrixAlgebraElement
from glim.models.graph import MarkedGraph
from glim.models.words import IDENTITY, Word, parse_word
from glim.seeding import SeedLike, make_rng


@dataclass(frozen=True, eq=False)
class PermutationRep:
    """d permutations of {0..n-1}, i.e. a representation ρ_n of F_d."""

    n: int
    perms: np.ndarray

    def __post_init__(self):
        perms = np.array(self.perms, dtype=np.int64).reshape(-1, self.n)
        expected = np.arange(self.n)
        for i, sigma in enumerate(perms):
            if not np.array_equal(np.sort(sigma), expected):
                raise ValueError(
                    f"Permutation {i + 1} is not a bijection of 0..{self.n - 1}"
                )
        perms.setflags(write=False)
        object.__setattr__(self, "perms", perms)

    @property
    def d(self) -> int:
        return int(self.perms.shape[0])

    @cached_property
    def inverse_perms(self) -> np.ndarray:
        inverse = np.empty_like(self.perms)
        rows = np.arange(self.n)
        for i, sigma in enumerate(self.perms):
            inverse[i, sigma] = rows
        inverse.setflags(write=False)
        return inverse

    # ===== Constructors
    @classmethod
    def uniform(cls, n: int, d: int, seed: SeedLike) -> "PermutationRep":
        rng = make_rng(seed)
        if not d:
            return cls(n, np.empty((0, n)))
        return cls(n, np.stack([rng.permutation(n) for _ in range(d)]))

    @classmethod
    def cycle(cls, n: int, d: int = 1) -> "PermutationRep":
        """Every generator acts as the n-cycle x -> x + 1 mod n."""
        shift = (np.arange(n) + 1) % n
        return cls(n, np.tile(shift, (d, 1)))

    @classmethod
    def identity(cls, n: int, d: int) -> "PermutationRep":
        return cls(n, np.tile(np.arange(n), (d, 1)))

    # ===== Action
    def letter_permutation(self, letter: int) -> np.ndarray:
        if letter == 0 or abs(letter) > self.d:
            raise ValueError(f"Invalid letter {letter} for d={self.d}")
        return self.perms[letter - 1] if letter > 0 else self.inverse_perms[-letter - 1]

    def word_permutation(self, w) -> np.ndarray:
        """ρ(w) as an array x -> ρ(w)(x)."""
        image = np.arange(self.n)
        for letter in reversed(parse_word(w)):
            image = self.letter_permutation(letter)[image]
        return image

    def __eq__(self, other):
        return (
            isinstance(other, PermutationRep)
            and self.n == other.n
            and np.array_equal(self.perms, other.perms)
        )

    __hash__ = None


def permutation_matrix(sigma: np.ndarray) -> sparse.csr_matrix:
    n = sigma.size
    return sparse.csr_matrix((np.ones(n), (sigma, np.arange(n))), shape=(n, n))


def evaluate_rep(
    a: Union[AlgebraElement, MatrixAlgebraElement], rep: PermutationRep
) -> sparse.csr_matrix:
    """ρ_n(a) = Σ_w a_w ⊗ P(w) as a sparse matrix.

    The matrix has size n, or k·n when the coefficients are k×k matrices.
    """
    if a.d != rep.d:
        raise ValueError(f"Generator counts differ: element d={a.d}, rep d={rep.d}")
    n = rep.n
    columns = np.arange(n)
    if isinstance(a, MatrixAlgebraElement):
        total = sparse.csr_matrix((a.k * n, a.k * n), dtype=np.complex128)
        for w, block in a.coeffs.items():
            total = total + sparse.kron(
                sparse.csr_matrix(block),
                permutation_matrix(rep.word_permutation(w)),
                format="csr",
            )
        return total
    rows, cols, data = [], [], []
    for w, c in a.coeffs.items():
        rows.append(rep.word_permutation(w))
        cols.append(columns)
        data.append(np.full(n, complex(c)))
    if not rows:
        return sparse.csr_matrix((n, n), dtype=np.complex128)
    entries = (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols)))
    matrix = sparse.coo_matrix(entries, shape=(n, n)).tocsr()
    if all(complex(c).imag == 0 for c in a.coeffs.values()):
        matrix = matrix.real.tocsr()
    return matrix


def character_fraction(rep: PermutationRep, w) -> float:
    """(1/n) Tr ρ_n(w) = fraction of fixed points of ρ_n(w), for reduced w ≠ e."""
    word = parse_word(w)
    if word.is_identity():
        raise ValueError("character_fraction requires a nonempty reduced word")
    image = rep.word_permutation(word)
    return float(np.count_nonzero(image == np.arange(rep.n))) / rep.n


def character_fractions(
    rep: PermutationRep, max_length: int
) -> Iterator[Tuple[Word, float]]:
    """Fixed-point fraction of every reduced word with 1 <= |w| <= max_length.

    Permutations are built incrementally along the word tree.
    """
    letters = [i for i in range(1, rep.d + 1)] + [-i for i in range(1, rep.d + 1)]
    identity = np.arange(rep.n)
    layer: List[Tuple[Word, np.ndarray]] = [(IDENTITY, identity)]
    for _ in range(max_length):
        next_layer = []
        for w, image in layer:
            for letter in letters:
                if w and w[-1] == -letter:
                    continue
                # ρ(w·l)(x) = ρ(w)(ρ(l)(x))
                extended = image[rep.letter_permutation(letter)]
                word = Word._trusted(w + (letter,))
                next_layer.append((word, extended))
                yield word, float(np.count_nonzero(extended == identity)) / rep.n
        layer = next_layer


def matrix_coeff_operator(
    blocks: Sequence[np.ndarray], rep: PermutationRep
) -> sparse.csr_matrix:
    """Σ_i a_i ⊗ P_i with P_0 = I, P_i = ρ(g_i), P_{-i} = P_iᵀ.

    Blocks are ordered e, g_1..g_d, g_1⁻¹..g_d⁻¹; coordinates are ordered
    (v, x) -> v·n + x.
    """
    if len(blocks) != 2 * rep.d + 1:
        raise ValueError(
            f"Expected {2 * rep.d + 1} blocks for d={rep.d}, got {len(blocks)}"
        )
    k = np.shape(blocks[0])[0]
    for block in blocks:
        if np.shape(block) != (k, k):
            raise ValueError("All blocks must be square of the same size")
    factors = [sparse.identity(rep.n, format="csr")]
    factors += [permutation_matrix(sigma) for sigma in rep.perms]
    factors += [permutation_matrix(sigma).T.tocsr() for sigma in rep.perms]
    dtype = np.result_type(*blocks, np.float64)
    total = sparse.csr_matrix((k * rep.n, k * rep.n), dtype=dtype)
    for block, factor in zip(blocks, factors):
        if np.any(block):
            total = total + sparse.kron(sparse.csr_matrix(block), factor, format="csr")
    return total


def fiber_constant_basis(k: int, n: int) -> sparse.csr_matrix:
    """Orthonormal basis of C^k ⊗ 1 as a (k·n) x k matrix."""
    rows = np.arange(k * n)
    cols = rows // n
    values = np.full(k * n, 1 / np.sqrt(n))
    return sparse.csr_matrix((values, (rows, cols)), shape=(k * n, k))


def cover_element(base: MarkedGraph) -> MatrixAlgebraElement:
    """Adjacency of the universal cover of ``base`` as an element of M_V(C)[F_E].

    One free generator per unoriented base edge e_i (the half-edge with the
    smaller id); g_i carries E_{e₊ e₋}·ξ(e_i) and g_i⁻¹ carries
    E_{e₋ e₊}·ξ(e_i⁻¹). Evaluated on a permutation representation it gives
    the adjacency of the corresponding n-lift.
    """
    k = base.vertex_count
    forward = np.flatnonzero(base.partner > np.arange(base.num_half_edges))
    d = forward.size
    coeffs = {}
    for i, e in enumerate(forward.tolist(), start=1):
        u, v = int(base.source[e]), int(base.target[e])
        reverse = int(base.partner[e])
        block = np.zeros((k, k), dtype=np.complex128)
        block[v, u] = base.mark(e)
        coeffs[Word.generator(i)] = block
        inverse_block = np.zeros((k, k), dtype=np.complex128)
        inverse_block[u, v] = base.mark(reverse)
        coeffs[Word.generator(-i)] = inverse_block
    return MatrixAlgebraElement(d, k, coeffs)
