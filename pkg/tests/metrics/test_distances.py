import math
import time

import numpy as np
import pytest

from src.metrics.distances import (
    SemimetricParams,
    check_restricted_triangle,
    dist_comp,
    dist_mixture,
    dist_mixture_bruteforce,
    pairwise_mixture_distances,
    triangle_violations,
)
from src.models.mixture import Component, Gmm
from src.utils.errors import DimensionMismatch
from tests.conftest import random_spd


def _random_gmm(gen, k, d):
    weights = gen.dirichlet(np.ones(k))
    means = gen.standard_normal((k, d)) * 2.0
    covs = [random_spd(gen, d) for _ in range(k)]
    return Gmm.from_arrays(weights, means, covs)


def test_dist_comp_one_dimensional():
    a = Component.build(0.5, [0.0], [[1.0]])
    b = Component.build(0.3, [1.0], [[4.0]])
    # covariance ratio 4 under a's whitening dominates
    assert dist_comp(a, b) == pytest.approx(3.0)
    assert dist_comp(b, a) == pytest.approx(3.0)


def test_dist_comp_mean_shift():
    a = Component.build(0.5, [0.0], [[1.0]])
    b = Component.build(0.5, [2.0], [[1.0]])
    assert dist_comp(a, b) == pytest.approx(2.0)


def test_dist_comp_identity_is_exact_zero(two_component_gmm):
    c = two_component_gmm.components[1]
    assert dist_comp(c, c) == 0.0


def test_dist_comp_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        dist_comp(Component.build(0.5, [0.0], [[1.0]]), Component.build(0.5, [0.0, 0.0], np.eye(2)))


def test_dist_mixture_ignores_labels(two_component_gmm):
    assert dist_mixture(two_component_gmm, two_component_gmm.permuted([1, 0])) == 0.0


def test_dist_mixture_agrees_with_bruteforce():
    gen = np.random.default_rng(4)
    for k in (1, 2, 3, 4):
        for d in (1, 2, 3):
            a, b = _random_gmm(gen, k, d), _random_gmm(gen, k, d)
            assert dist_mixture(a, b) == pytest.approx(dist_mixture_bruteforce(a, b), abs=0)
            assert dist_mixture(a, b) == pytest.approx(dist_mixture(b, a), rel=1e-12)


def test_dist_mixture_shape_mismatch(two_component_gmm):
    single = Gmm.from_arrays([1.0], [[0.0, 0.0]], [np.eye(2)])
    with pytest.raises(DimensionMismatch):
        dist_mixture(two_component_gmm, single)


def test_pairwise_table():
    gen = np.random.default_rng(8)
    mixtures = [_random_gmm(gen, 2, 2) for _ in range(4)] + [None]
    table = pairwise_mixture_distances(mixtures)
    assert table.shape == (5, 5)
    np.testing.assert_array_equal(np.diag(table), 0.0)
    np.testing.assert_array_equal(table, table.T)
    assert all(math.isinf(v) for v in table[4, :4])
    assert table[0, 1] == dist_mixture(mixtures[0], mixtures[1])
    np.testing.assert_array_equal(table, pairwise_mixture_distances(mixtures, max_workers=3))


def test_restricted_triangle_check():
    params = SemimetricParams(r=1.0, z=1.5)
    assert check_restricted_triangle(2.0, 0.1, 100.0, params)
    assert check_restricted_triangle(0.5, 0.5, 1.5, params)
    assert not check_restricted_triangle(0.5, 0.5, 1.6, params)


def test_triangle_violations():
    table = np.array([[0.0, 0.1, 1.0], [0.1, 0.0, 0.1], [1.0, 0.1, 0.0]])
    violations = triangle_violations(table, SemimetricParams(r=1.0, z=1.5))
    assert set(violations) == {(0, 1, 2), (2, 1, 0)}


@pytest.mark.slow
def test_dist_mixture_matches_bruteforce_at_scale():
    gen = np.random.default_rng(2024)
    for k in range(2, 7):
        for d in (1, 2, 3):
            for _ in range(1000):
                a, b = _random_gmm(gen, k, d), _random_gmm(gen, k, d)
                assert dist_mixture(a, b) == pytest.approx(dist_mixture_bruteforce(a, b), abs=1e-12)


@pytest.mark.slow
def test_pairwise_table_cost_is_quadratic():
    gen = np.random.default_rng(9)
    sizes = np.array([50, 100, 200, 400])
    mixtures = [_random_gmm(gen, 2, 2) for _ in range(sizes[-1])]
    seconds = []
    for t in sizes:
        runs = []
        for _ in range(3):
            started = time.perf_counter()
            pairwise_mixture_distances(mixtures[:t])
            runs.append(time.perf_counter() - started)
        seconds.append(min(runs))
    slope = np.polyfit(np.log(sizes), np.log(seconds), 1)[0]
    assert 1.8 <= slope <= 2.2
