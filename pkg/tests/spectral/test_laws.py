import numpy as np
import pytest
from scipy import integrate, stats

from glim.spectral.laws import (
    gw_kernel_mass,
    hausdorff_distance,
    kesten_mckay_cdf,
    kesten_mckay_cdf_vector,
    kesten_mckay_density,
    kesten_mckay_edge,
    kesten_mckay_moments,
    ks_distance,
    multiset_distance,
)

OMEGA = 0.5671432904097838


@pytest.mark.parametrize("d", [3, 4, 7])
def test_kesten_mckay_density_is_a_probability(d):
    edge = kesten_mckay_edge(d)
    total, _ = integrate.quad(lambda x: kesten_mckay_density(d, x), -edge, edge)
    assert total == pytest.approx(1.0, abs=1e-7)
    assert kesten_mckay_density(d, edge + 0.1) == 0.0


def test_kesten_mckay_cdf():
    assert kesten_mckay_cdf(4, 0.0) == pytest.approx(0.5, abs=1e-9)
    assert kesten_mckay_cdf(2, 0.0) == pytest.approx(0.5)
    assert kesten_mckay_cdf(3, -10.0) == 0.0
    assert kesten_mckay_cdf(3, 10.0) == 1.0
    total = kesten_mckay_cdf(4, 1.0) + kesten_mckay_cdf(4, -1.0)
    assert total == pytest.approx(1.0, abs=1e-9)


def test_kesten_mckay_cdf_vector_agrees_with_scalar():
    cdf = kesten_mckay_cdf_vector(4)
    points = np.array([1.0, -10.0, 0.0, 10.0, -1.5])
    expected = [kesten_mckay_cdf(4, x) for x in points]
    assert cdf(points) == pytest.approx(expected, abs=1e-8)


def test_kesten_mckay_requires_degree_two():
    with pytest.raises(ValueError, match="requires d >= 2"):
        kesten_mckay_density(1, 0.0)
    with pytest.raises(ValueError, match="requires d >= 2"):
        kesten_mckay_cdf_vector(0)


def test_kesten_mckay_moments():
    assert kesten_mckay_moments(4, 4) == [1, 0, 4, 0, 28]
    assert kesten_mckay_moments(3, 4) == [1, 0, 3, 0, 15]
    # the line: central binomial coefficients
    assert kesten_mckay_moments(2, 6) == [1, 0, 2, 0, 6, 0, 20]


def test_kesten_mckay_moments_match_the_density():
    edge = kesten_mckay_edge(3)
    fourth, _ = integrate.quad(lambda x: x**4 * kesten_mckay_density(3, x), -edge, edge)
    assert fourth == pytest.approx(15.0, rel=1e-6)


def test_ks_distance():
    quantiles = (np.arange(100) + 0.5) / 100
    assert ks_distance(quantiles, stats.uniform.cdf) == pytest.approx(0.005)

    arcsine = 2 * np.sin(np.pi * (quantiles - 0.5))
    distance = ks_distance(arcsine, kesten_mckay_cdf_vector(2))
    assert distance == pytest.approx(0.005, abs=1e-9)

    with pytest.raises(ValueError, match="requires real values"):
        ks_distance(np.array([1j, 1.0]), stats.uniform.cdf)


def test_gw_kernel_mass_at_mean_one():
    q, mass = gw_kernel_mass(1.0)
    assert q == pytest.approx(OMEGA, abs=1e-10)
    assert mass == pytest.approx(2 * OMEGA + OMEGA**2 - 1, abs=1e-10)


@pytest.mark.parametrize("d", [0.5, 2.0, 4.0, 10.0])
def test_gw_kernel_mass_is_the_smallest_fixed_point(d):
    q, mass = gw_kernel_mass(d)
    assert q == pytest.approx(np.exp(-d * np.exp(-d * q)), abs=1e-10)
    grid = np.linspace(0.0, q, 200, endpoint=False)
    assert np.all(grid - np.exp(-d * np.exp(-d * grid)) < 0)
    assert 0.0 <= mass <= 1.0


def test_gw_kernel_mass_requires_positive_mean():
    with pytest.raises(ValueError, match="requires d > 0"):
        gw_kernel_mass(0.0)


def test_spectrum_distances():
    assert hausdorff_distance([0.0, 1.0], [0.0, 1.0, 3.0]) == pytest.approx(2.0)
    assert hausdorff_distance([1j], [1j]) == 0.0
    assert multiset_distance([1.0, 2.0], [2.5, 1.0]) == pytest.approx(0.5)
    assert multiset_distance([1.0, 1.0], [1.0, 3.0]) == pytest.approx(2.0)
    assert multiset_distance([1.0], [1.0, 1.0]) == float("inf")
    assert multiset_distance([], []) == 0.0
