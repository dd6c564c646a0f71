"""Group algebra C[F_d] and its matrix-coefficient version M_k(C)[F_d].

Elements are finitely supported maps Word -> coefficient. Products are
convolutions with eager word reduction, so every stored key is reduced.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Union

import numpy as np

from glim.errors import BudgetExceededError
from glim.models.words import IDENTITY, Word, free_generators, parse_word, word_concat

logger = logging.getLogger(__name__)

SUPPORT_BUDGET = 10**6
EDGE_EXPONENT = 0.75


class _GroupAlgebraElement:
    """Arithmetic shared by scalar and matrix coefficients.

    Subclasses provide ``_zero_like``, ``_is_zero``, ``_star`` (coefficient
    adjoint), ``_product``, ``_square_norm`` and ``_rebuild``.
    """

    d: int
    coeffs: Dict[Word, object]

    def _check_same(self, other):
        if type(other) is not type(self):
            raise ValueError(
                f"Cannot combine {type(self).__name__} with {type(other).__name__}"
            )
        if other.d != self.d:
            raise ValueError(f"Generator counts differ: {self.d} != {other.d}")

    def _cleaned(self, coeffs: Dict[Word, object]):
        return self._rebuild({w: c for w, c in coeffs.items() if not self._is_zero(c)})

    @property
    def support(self) -> List[Word]:
        return sorted(self.coeffs, key=lambda w: (len(w), w))

    @property
    def support_size(self) -> int:
        return len(self.coeffs)

    def max_length(self) -> int:
        return max((len(w) for w in self.coeffs), default=0)

    def __add__(self, other):
        self._check_same(other)
        coeffs = dict(self.coeffs)
        for w, c in other.coeffs.items():
            coeffs[w] = coeffs[w] + c if w in coeffs else c
        return self._cleaned(coeffs)

    def __neg__(self):
        return self._rebuild({w: -c for w, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, _GroupAlgebraElement):
            return alg_mul(self, other)
        if isinstance(other, (int, float, complex, np.number)):
            return self._cleaned({w: c * other for w, c in self.coeffs.items()})
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self * other
        return NotImplemented

    def __pow__(self, exponent: int):
        if exponent < 0:
            raise ValueError("Negative powers are not defined")
        result = self.unit()
        for _ in range(exponent):
            result = alg_mul(result, self)
        return result

    def adjoint(self):
        return alg_adjoint(self)

    def is_self_adjoint(self, tol: float = 1e-12) -> bool:
        star = self.adjoint()
        for w in set(self.coeffs) | set(star.coeffs):
            diff = self.coefficient(w) - star.coefficient(w)
            if np.max(np.abs(diff)) > tol:
                return False
        return True

    def l2_norm(self) -> float:
        return math.sqrt(math.fsum(self._square_norm(c) for c in self.coeffs.values()))


@dataclass(frozen=True)
class AlgebraElement(_GroupAlgebraElement):
    """a = Σ_g a_g g with complex coefficients."""

    d: int
    coeffs: Dict[Word, complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.d < 0:
            raise ValueError(f"Invalid generator count {self.d}")
        for w in self.coeffs:
            if not isinstance(w, Word):
                raise ValueError(f"Invalid key {w!r}: expected Word")
            if w.rank() > self.d:
                raise ValueError(f"Word {w!r} uses a generator beyond d={self.d}")

    # ===== Constructors
    @classmethod
    def from_dict(cls, d: int, mapping: Mapping) -> "AlgebraElement":
        coeffs: Dict[Word, complex] = {}
        for key, value in mapping.items():
            w = parse_word(key)
            coeffs[w] = coeffs.get(w, 0) + complex(value)
        return cls(d, {w: c for w, c in coeffs.items() if c != 0})

    @classmethod
    def identity(cls, d: int) -> "AlgebraElement":
        return cls(d, {IDENTITY: 1 + 0j})

    @classmethod
    def generator(cls, d: int, i: int) -> "AlgebraElement":
        return cls(d, {Word.generator(i): 1 + 0j})

    @classmethod
    def adjacency(cls, d: int) -> "AlgebraElement":
        """a_S = Σ_{s ∈ S} s with S the free generators and their inverses."""
        return cls(d, {s: 1 + 0j for s in free_generators(d)})

    @classmethod
    def from_words(
        cls, d: int, words: Iterable, weight: complex = 1
    ) -> "AlgebraElement":
        coeffs: Dict[Word, complex] = {}
        for item in words:
            w = parse_word(item)
            coeffs[w] = coeffs.get(w, 0) + complex(weight)
        return cls(d, {w: c for w, c in coeffs.items() if c != 0})

    def unit(self) -> "AlgebraElement":
        return AlgebraElement.identity(self.d)

    # ===== Coefficient hooks
    def _rebuild(self, coeffs):
        return AlgebraElement(self.d, coeffs)

    @staticmethod
    def _is_zero(c) -> bool:
        return c == 0

    @staticmethod
    def _star(c):
        return complex(c).conjugate()

    @staticmethod
    def _product(x, y):
        return x * y

    @staticmethod
    def _square_norm(c) -> float:
        return abs(c) ** 2

    def coefficient(self, w) -> complex:
        return self.coeffs.get(parse_word(w), 0j)

    def tau(self) -> complex:
        return self.coeffs.get(IDENTITY, 0j)

    def l1_norm(self) -> float:
        return math.fsum(abs(c) for c in self.coeffs.values())

    def has_nonnegative_coefficients(self) -> bool:
        coeffs = map(complex, self.coeffs.values())
        return all(c.imag == 0 and c.real >= 0 for c in coeffs)

    def to_json(self) -> Dict[str, List[float]]:
        """{word token: [re, im]}; the identity is the token 'e'."""
        items = sorted(self.coeffs.items(), key=lambda item: (len(item[0]), item[0]))
        return {
            (w.token() or "e"): [complex(c).real, complex(c).imag] for w, c in items
        }

    @classmethod
    def from_json(cls, d: int, data: Mapping[str, List[float]]) -> "AlgebraElement":
        return cls.from_dict(d, {k: complex(v[0], v[1]) for k, v in data.items()})

    def __repr__(self):
        terms = " + ".join(f"{complex(c):g}*{w!r}" for w, c in self.to_sorted())
        return f"AlgebraElement(d={self.d}, {terms or '0'})"

    def to_sorted(self):
        return sorted(self.coeffs.items(), key=lambda item: (len(item[0]), item[0]))


@dataclass(frozen=True, eq=False)
class MatrixAlgebraElement(_GroupAlgebraElement):
    """b = Σ_g b_g ⊗ g with k x k complex matrix coefficients.

    The trace is τ(b) = (1/k) Tr b_e and ‖b‖₂² = Σ_g (1/k) Tr(b_g b_g*).
    """

    d: int
    k: int
    coeffs: Dict[Word, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        for w, c in self.coeffs.items():
            if not isinstance(w, Word):
                raise ValueError(f"Invalid key {w!r}: expected Word")
            if np.shape(c) != (self.k, self.k):
                raise ValueError(f"Coefficient of {w!r} must be {self.k}x{self.k}")

    @classmethod
    def identity(cls, d: int, k: int) -> "MatrixAlgebraElement":
        return cls(d, k, {IDENTITY: np.eye(k, dtype=np.complex128)})

    @classmethod
    def from_blocks(cls, blocks: List[np.ndarray]) -> "MatrixAlgebraElement":
        """Blocks indexed by e, g_1..g_d, g_1⁻¹..g_d⁻¹."""
        if len(blocks) % 2 != 1:
            raise ValueError("Expected 2d+1 blocks")
        d = len(blocks) // 2
        k = np.shape(blocks[0])[0]
        words = [IDENTITY] + free_generators(d)
        coeffs = {
            w: np.asarray(b, dtype=np.complex128)
            for w, b in zip(words, blocks)
            if np.any(np.asarray(b) != 0)
        }
        return cls(d, k, coeffs)

    def unit(self) -> "MatrixAlgebraElement":
        return MatrixAlgebraElement.identity(self.d, self.k)

    def _rebuild(self, coeffs):
        return MatrixAlgebraElement(self.d, self.k, coeffs)

    @staticmethod
    def _is_zero(c) -> bool:
        return not np.any(c)

    @staticmethod
    def _star(c):
        return np.conj(c).T

    @staticmethod
    def _product(x, y):
        return x @ y

    def _square_norm(self, c) -> float:
        return float(np.sum(np.abs(c) ** 2)) / self.k

    def coefficient(self, w) -> np.ndarray:
        zero = np.zeros((self.k, self.k), dtype=np.complex128)
        return self.coeffs.get(parse_word(w), zero)

    def tau(self) -> complex:
        coeff = self.coeffs.get(IDENTITY)
        return 0j if coeff is None else complex(np.trace(coeff)) / self.k

    def l1_norm(self) -> float:
        return math.fsum(float(np.linalg.norm(c, 2)) for c in self.coeffs.values())

    def has_nonnegative_coefficients(self) -> bool:
        return all(
            np.all(np.imag(c) == 0) and np.all(np.real(c) >= 0)
            for c in self.coeffs.values()
        )


AnyElement = Union[AlgebraElement, MatrixAlgebraElement]


def alg_mul(a: AnyElement, b: AnyElement, budget: Optional[int] = None) -> AnyElement:
    """Convolution a.b = Σ_{g,h} a_g b_h (gh).

    Raises:
        BudgetExceededError: if the product support grows beyond ``budget``.
    """
    a._check_same(b)
    out: Dict[Word, object] = {}
    product = a._product
    for u, x in a.coeffs.items():
        for w, y in b.coeffs.items():
            g = word_concat(u, w)
            value = product(x, y)
            if g in out:
                out[g] = out[g] + value
            else:
                out[g] = value
        if budget is not None and len(out) > budget:
            raise BudgetExceededError(
                f"Product support exceeds budget {budget}", budget, len(out)
            )
    return a._cleaned(out)


def alg_adjoint(a: AnyElement) -> AnyElement:
    """a* = Σ_g conj(a_g) g⁻¹."""
    return a._rebuild({w.inverse(): a._star(c) for w, c in a.coeffs.items()})


def tau(a: AnyElement) -> complex:
    return a.tau()


def l2_norm(a: AnyElement) -> float:
    return a.l2_norm()


# ===== Operator norm of λ(a)
@dataclass
class NormEstimate:
    """Estimates of ‖λ(a)‖ from ℓ² norms of powers.

    ``lower_bounds[l-1]`` is ‖a^l‖₂^{1/l}, a rigorous lower bound.
    ``extrapolated`` is a heuristic value, reported separately.
    """

    lower_bounds: List[float]
    extrapolated: float
    support_sizes: List[int]
    truncated: bool = False
    symmetrized: bool = False
    notes: List[str] = field(default_factory=list)

    @property
    def best_lower_bound(self) -> float:
        return max(self.lower_bounds, default=0.0)

    def to_dict(self) -> dict:
        return {
            "lower_bounds": self.lower_bounds,
            "extrapolated": self.extrapolated,
            "support_sizes": self.support_sizes,
            "truncated": self.truncated,
            "symmetrized": self.symmetrized,
            "notes": self.notes,
        }


def extrapolate_norm(
    lower_bounds: List[float], edge_exponent: float = EDGE_EXPONENT
) -> float:
    """Richardson step in 1/l on the last two even powers.

    For a square-root spectral edge, log ‖a^l‖₂^{1/l} =
    log ρ - edge_exponent·log(l)/l + c/l + o(1/l); the log term is removed
    before eliminating c/l. Sequences that stopped growing are returned as is.
    """
    best = max(lower_bounds, default=0.0)
    if best <= 0:
        return 0.0
    top = len(lower_bounds) - len(lower_bounds) % 2
    if top < 4:
        return best
    l1, l2 = top - 2, top
    e1, e2 = lower_bounds[l1 - 1], lower_bounds[l2 - 1]
    if e2 - e1 <= 1e-12 * e2:
        return best
    f1 = math.log(e1) + edge_exponent * math.log(l1) / l1
    f2 = math.log(e2) + edge_exponent * math.log(l2) / l2
    rho = math.exp((l2 * f2 - l1 * f1) / (l2 - l1))
    return max(rho, best)


def operator_norm_estimate(
    a: AnyElement,
    L: int,
    budget: int = SUPPORT_BUDGET,
    edge_exponent: float = EDGE_EXPONENT,
) -> NormEstimate:
    """‖a^l‖₂^{1/l} for l = 1..L plus an extrapolated value.

    Non self-adjoint inputs are replaced by a a* and the square root of the
    estimates is returned. When a power exceeds ``budget`` words the sequence
    stops early and ``truncated`` is set.
    """
    if L < 1:
        raise ValueError(f"Invalid power count L={L}")
    if not a.is_self_adjoint():
        inner = operator_norm_estimate(
            alg_mul(a, alg_adjoint(a)), L, budget, edge_exponent
        )
        return NormEstimate(
            lower_bounds=[math.sqrt(x) for x in inner.lower_bounds],
            extrapolated=math.sqrt(inner.extrapolated),
            support_sizes=inner.support_sizes,
            truncated=inner.truncated,
            symmetrized=True,
            notes=inner.notes + ["estimated through a a*"],
        )

    lower_bounds: List[float] = []
    support_sizes: List[int] = []
    notes: List[str] = []
    truncated = False
    power = a
    for l in range(1, L + 1):
        lower_bounds.append(power.l2_norm() ** (1.0 / l))
        support_sizes.append(power.support_size)
        if l == L:
            break
        try:
            power = alg_mul(power, a, budget)
        except BudgetExceededError as err:
            truncated = True
            message = (
                f"support of a^{l + 1} exceeds {budget} words; "
                f"stopped after l={l}"
            )
            logger.warning(message)
            notes.append(message)
            break
    return NormEstimate(
        lower_bounds=lower_bounds,
        extrapolated=extrapolate_norm(lower_bounds, edge_exponent),
        support_sizes=support_sizes,
        truncated=truncated,
        notes=notes,
    )


def haagerup_upper_bound(a: AnyElement) -> float:
    """(r+1)·‖a‖₂·√|supp a| with r the longest word; valid but not sharp."""
    return (a.max_length() + 1) * a.l2_norm() * math.sqrt(a.support_size)


def alon_boppana_lower_bound(a: AlgebraElement, l: int, n: int, m: int = 1) -> float:
    """Lower bound on ‖ρ(a) restricted to an invariant subspace of codim m‖^{2l}.

    For a = a* with non-negative coefficients and a permutation
    representation of degree n, Tr ρ(a^{2l}) >= n‖a^l‖₂² and the deflated part
    carries at most m·‖a‖₁^{2l}, giving (n‖a^l‖₂² - m‖a‖₁^{2l}) / (n - m).
    """
    if not a.has_nonnegative_coefficients():
        raise ValueError("Rigorous restricted bound requires non-negative coefficients")
    if n <= m:
        raise ValueError(f"Invalid codimension m={m} for n={n}")
    norm2 = (a**l).l2_norm() ** 2
    return (n * norm2 - m * a.l1_norm() ** (2 * l)) / (n - m)


def displayed_lower_bound(
    a: AnyElement, l: int, n: int, m: int = 1, k: int = 1
) -> float:
    """‖a^l‖₂² (1 - |S|^l √k m / n) with S the support of a, clamped at 0."""
    norm2 = (a**l).l2_norm() ** 2
    return max(0.0, norm2 * (1.0 - a.support_size**l * math.sqrt(k) * m / n))
