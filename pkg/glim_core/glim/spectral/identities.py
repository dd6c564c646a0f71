"""Exact identities linking the adjacency and non-backtracking spectra."""
import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from glim.errors import BudgetExceededError
from glim.models.graph import MarkedGraph
from glim.spectral.operators import divergence, non_backtracking

logger = logging.getLogger(__name__)

IHARA_HALF_EDGE_LIMIT = 400
UNIT_TOL = 1e-8


def euler_characteristic(g: MarkedGraph) -> int:
    """χ = |E|/2 − |V| + 1 with |E| counting half-edges."""
    return g.num_edges - g.vertex_count + 1


def ihara_pencil(g: MarkedGraph, z: complex) -> np.ndarray:
    """z²I − zA + D − I as a dense matrix."""
    n = g.vertex_count
    a = g.adjacency_csr.toarray()
    return (z * z - 1) * np.eye(n, dtype=np.complex128) - z * a + np.diag(g.degrees())


def _log_det(matrix: np.ndarray) -> Tuple[complex, float]:
    if matrix.shape[0] == 0:
        return 1.0 + 0j, 0.0
    sign, logabs = np.linalg.slogdet(matrix)
    return complex(sign), float(logabs)


def ihara_bass_residual(g: MarkedGraph, z: complex) -> Tuple[complex, complex, float]:
    """Both sides of det(zI − B) = (z² − 1)^{χ−1}·det(z²I − zA + D − I).

    A negative exponent χ − 1 (forests) is applied as a division. The sides
    are compared in the log domain; the gap is relative to
    max(|lhs|, |rhs|, 1).

    Returns:
        (lhs, rhs, relative gap)
    """
    if g.is_marked:
        raise ValueError("Ihara-Bass identity requires an unmarked graph")
    if g.num_half_edges > IHARA_HALF_EDGE_LIMIT:
        raise BudgetExceededError(
            f"Dense determinants limited to {IHARA_HALF_EDGE_LIMIT} half-edges",
            IHARA_HALF_EDGE_LIMIT,
            g.num_half_edges,
        )
    z = complex(z)
    exponent = euler_characteristic(g) - 1
    prefactor = z * z - 1
    if prefactor == 0 and exponent < 0:
        raise ValueError("z = ±1 is a pole of (z² − 1)^{χ−1} for this graph")

    b = non_backtracking(g).toarray()
    lhs_sign, lhs_log = _log_det(z * np.eye(b.shape[0]) - b)
    rhs_sign, rhs_log = _log_det(ihara_pencil(g, z))
    if prefactor == 0:
        rhs_sign, rhs_log = (rhs_sign, rhs_log) if exponent == 0 else (0j, -np.inf)
    else:
        rhs_sign *= (prefactor / abs(prefactor)) ** exponent
        rhs_log += exponent * np.log(abs(prefactor))

    scale = max(lhs_log, rhs_log, 0.0)
    left = lhs_sign * np.exp(lhs_log - scale) if lhs_sign != 0 else 0j
    right = rhs_sign * np.exp(rhs_log - scale) if rhs_sign != 0 else 0j
    gap = abs(left - right) / max(abs(left), abs(right), np.exp(-scale))
    with np.errstate(over="ignore"):
        lhs = lhs_sign * np.exp(lhs_log) if lhs_sign != 0 else 0j
        rhs = rhs_sign * np.exp(rhs_log) if rhs_sign != 0 else 0j
    return complex(lhs), complex(rhs), float(gap)


def regular_nb_from_adjacency(
    adj_spectrum, d: int, tol: float = UNIT_TOL
) -> np.ndarray:
    """σ(B) of a d-regular graph from its adjacency spectrum.

    Each μ contributes the two roots of λ² − μλ + (d − 1); the eigenvalues +1
    and −1 are then added χ − 1 times each, or removed when χ − 1 < 0, so that
    the total count is the number of half-edges.
    """
    mu = np.asarray(adj_spectrum, dtype=np.complex128).reshape(-1)
    n = mu.size
    if (n * d) % 2:
        raise ValueError(f"No {d}-regular graph on {n} vertices")
    exponent = n * d // 2 - n
    root = np.sqrt(mu * mu - 4 * (d - 1))
    values = list(np.concatenate([(mu + root) / 2, (mu - root) / 2]))
    if exponent >= 0:
        values += [1.0 + 0j] * exponent + [-1.0 + 0j] * exponent
    else:
        for unit in (1.0, -1.0):
            for _ in range(-exponent):
                distances = np.abs(np.asarray(values) - unit)
                index = int(np.argmin(distances))
                if distances[index] > np.sqrt(tol):
                    raise ValueError(
                        f"Spectrum lacks the eigenvalue {unit:+.0f} required by χ"
                    )
                values.pop(index)
    return np.asarray(values, dtype=np.complex128)


def regular_nb_top_moduli(mu: float, d: int) -> Tuple[float, float]:
    """|λ₁| and |λ₂| of B for a d-regular graph, from its adjacency spectrum.

    ``mu`` is max(μ₂, −μ_n) after deflating constants, as returned by
    ``second_eigenvalue``. |λ₂| is the largest root modulus of
    λ² − μλ + (d − 1), which is √(d − 1) whenever |μ| <= 2√(d − 1).
    """
    if d < 2:
        raise ValueError(f"regular_nb_top_moduli requires d >= 2, got {d}")
    roots = np.roots([1.0, -float(mu), d - 1.0])
    return float(d - 1), float(np.max(np.abs(roots)))


@dataclass
class DivergenceResult:
    """φ̂ with its adjacency eigenvalue μ = λ + (d − 1)/λ.

    ``null`` marks a vanishing divergence, which happens for the ±1 family.
    """

    vector: np.ndarray
    mu: complex
    residual: float
    null: bool = False

    def to_dict(self) -> dict:
        return {
            "mu": [self.mu.real, self.mu.imag],
            "residual": self.residual,
            "null": self.null,
        }


def _regular_degree(g: MarkedGraph) -> int:
    degrees = g.degrees()
    if degrees.size == 0 or np.any(degrees != degrees[0]):
        raise ValueError("Graph is not regular")
    return int(degrees[0])


def divergence_eigenvector_map(
    g: MarkedGraph, phi: np.ndarray, lam: complex, tol: float = UNIT_TOL
) -> DivergenceResult:
    """Send an eigenvector of B to an eigenvector of A through its divergence.

    Raises:
        ValueError: g not regular, |λ| = 1, or Bφ ≠ λφ.
    """
    d = _regular_degree(g)
    lam = complex(lam)
    if abs(abs(lam) - 1) <= tol:
        raise ValueError("Eigenvalues with |λ| = 1 are excluded")
    phi = np.asarray(phi, dtype=np.complex128)
    scale = max(np.linalg.norm(phi), 1e-300)
    b = non_backtracking(g).matrix
    eig_residual = np.linalg.norm(b @ phi - lam * phi) / scale
    if eig_residual > tol * max(1.0, abs(lam)):
        raise ValueError(
            f"phi is not a B-eigenvector for λ={lam} (residual {eig_residual:.3g})"
        )
    mu = lam + (d - 1) / lam
    hat = divergence(g, phi)
    norm = np.linalg.norm(hat)
    if norm <= tol * scale:
        logger.debug(f"null divergence for λ={lam}")
        return DivergenceResult(hat, mu, 0.0, null=True)
    residual = np.linalg.norm(g.adjacency_csr @ hat - mu * hat) / norm
    return DivergenceResult(hat, mu, float(residual))


def nb_eigenvector_from_adjacency(
    g: MarkedGraph, f: np.ndarray, lam: complex
) -> np.ndarray:
    """φ(e) = f(e₊) − λ·f(e₋).

    An eigenvector of B for λ when Af = μf and λ² − μλ + d − 1 = 0.
    """
    _regular_degree(g)
    f = np.asarray(f, dtype=np.complex128)
    return f[g.target] - complex(lam) * f[g.source]
