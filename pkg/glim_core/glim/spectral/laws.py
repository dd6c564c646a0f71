"""Closed-form limit laws and distances between spectra."""
import logging
from typing import Callable, List, Sequence, Tuple, Union

import numpy as np
from scipy import integrate, stats
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import directed_hausdorff

logger = logging.getLogger(__name__)

QUAD_TOL = 1e-10
BISECTION_TOL = 1e-12
SCAN_POINTS = 2000


# ===== Kesten–McKay
def kesten_mckay_edge(d: int) -> float:
    return 2 * np.sqrt(d - 1)


def _check_degree(d: int):
    if d < 2:
        raise ValueError(f"Kesten-McKay law requires d >= 2, got {d}")


def kesten_mckay_density(d: int, x: Union[float, np.ndarray]):
    """d·√(4(d−1) − x²) / (2π(d² − x²)) on [−2√(d−1), 2√(d−1)], 0 outside.

    For d = 2 this is the arcsine density 1/(π√(4 − x²)).
    """
    _check_degree(d)
    x = np.asarray(x, dtype=np.float64)
    inside = 4 * (d - 1) - x**2
    with np.errstate(divide="ignore", invalid="ignore"):
        if d == 2:
            values = np.where(inside > 0, 1 / (np.pi * np.sqrt(inside)), 0.0)
        else:
            root = np.sqrt(np.maximum(inside, 0))
            values = np.where(inside > 0, d * root / (2 * np.pi * (d**2 - x**2)), 0.0)
    return float(values) if values.ndim == 0 else values


def kesten_mckay_cdf(d: int, x: float) -> float:
    """Cumulative distribution function, by adaptive quadrature to 1e-10."""
    _check_degree(d)
    edge = kesten_mckay_edge(d)
    if x <= -edge:
        return 0.0
    if x >= edge:
        return 1.0
    if d == 2:
        return float(0.5 + np.arcsin(x / 2) / np.pi)
    value, _ = integrate.quad(
        lambda t: kesten_mckay_density(d, t),
        -edge,
        x,
        epsabs=QUAD_TOL,
        epsrel=QUAD_TOL,
        limit=200,
    )
    return float(min(max(value, 0.0), 1.0))


def kesten_mckay_cdf_vector(d: int) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorized CDF for sorted or unsorted arrays.

    Integrates between consecutive sorted points and accumulates, so an array
    of n points costs n short quadratures instead of n full ones.
    """
    _check_degree(d)
    edge = kesten_mckay_edge(d)

    def cdf(points):
        points = np.asarray(points, dtype=np.float64)
        flat = points.reshape(-1)
        order = np.argsort(flat, kind="stable")
        clipped = np.clip(flat[order], -edge, edge)
        out = np.empty_like(clipped)
        if d == 2:
            out[:] = 0.5 + np.arcsin(clipped / 2) / np.pi
        else:
            total, previous = 0.0, -edge
            for i, x in enumerate(clipped):
                if x > previous:
                    piece, _ = integrate.quad(
                        lambda t: kesten_mckay_density(d, t),
                        previous,
                        x,
                        epsabs=QUAD_TOL,
                        epsrel=QUAD_TOL,
                    )
                    total += piece
                    previous = x
                out[i] = total
        result = np.empty_like(out)
        result[order] = np.clip(out, 0.0, 1.0)
        return result.reshape(points.shape)

    return cdf


def kesten_mckay_moments(d: int, K: int) -> List[int]:
    """Number of closed walks of length k at the root of T_d, for k = 0..K."""
    if d < 1:
        raise ValueError(f"Invalid degree {d}")
    # counts[j] = walks currently at distance j from the root
    counts = np.zeros(K + 2, dtype=object)
    counts[0] = 1
    moments = [1]
    for _ in range(K):
        nxt = np.zeros_like(counts)
        nxt[1] += d * counts[0]
        nxt[2:] += (d - 1) * counts[1:-1]
        nxt[:-1] += counts[1:]
        counts = nxt
        moments.append(int(counts[0]))
    return moments


def ks_distance(values: Sequence[float], cdf: Callable) -> float:
    """Kolmogorov–Smirnov distance between the empirical law of values and cdf."""
    values = np.real_if_close(np.asarray(values))
    if np.iscomplexobj(values):
        raise ValueError("KS distance requires real values")
    return float(stats.kstest(values, cdf).statistic)


# ===== Galton–Watson kernel mass
def _fixed_point_gap(d: float, q: float) -> float:
    return q - np.exp(-d * np.exp(-d * q))


def gw_kernel_mass(d: float) -> Tuple[float, float]:
    """Atom at 0 of the Poisson(d) Galton–Watson tree's adjacency spectrum.

    q is the smallest root in (0, 1) of q = exp(−d·exp(−dq)), found by a sign
    scan followed by bisection to 1e-12; the mass is
    q + e^{−dq} + dq·e^{−dq} − 1.

    Returns:
        (q, mass)
    """
    if d <= 0:
        raise ValueError(f"gw_kernel_mass requires d > 0, got {d}")
    grid = np.linspace(0.0, 1.0, SCAN_POINTS + 1)
    gaps = grid - np.exp(-d * np.exp(-d * grid))
    # gap(0) < 0 < gap(1) always; take the first sign change
    index = int(np.argmax(gaps >= 0))
    low, high = grid[index - 1], grid[index]
    while high - low > BISECTION_TOL:
        mid = (low + high) / 2
        if _fixed_point_gap(d, mid) >= 0:
            high = mid
        else:
            low = mid
    q = (low + high) / 2
    mass = q + np.exp(-d * q) + d * q * np.exp(-d * q) - 1
    return float(q), float(mass)


# ===== Distances between spectra
def _as_points(values) -> np.ndarray:
    values = np.asarray(values, dtype=np.complex128).reshape(-1)
    return np.column_stack([values.real, values.imag])


def hausdorff_distance(a, b) -> float:
    """Hausdorff distance between two finite subsets of C."""
    a, b = _as_points(a), _as_points(b)
    if a.size == 0 or b.size == 0:
        return 0.0 if a.size == b.size else float("inf")
    return float(max(directed_hausdorff(a, b)[0], directed_hausdorff(b, a)[0]))


def multiset_distance(a, b) -> float:
    """Largest displacement of an optimal matching between two multisets of C.

    The matching minimizes the total displacement; multisets of different
    sizes are at infinite distance.
    """
    a = np.asarray(a, dtype=np.complex128).reshape(-1)
    b = np.asarray(b, dtype=np.complex128).reshape(-1)
    if a.size != b.size:
        return float("inf")
    if a.size == 0:
        return 0.0
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())
