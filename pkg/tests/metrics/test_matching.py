import numpy as np
import pytest

from src.metrics.distances import SemimetricParams, triangle_violations
from src.metrics.matching import (
    bottleneck_bruteforce,
    bottleneck_matching,
    dist_k,
    has_perfect_matching,
)
from src.utils.errors import TooLarge


def test_bottleneck_small_case():
    assert bottleneck_matching([[1.0, 2.0], [2.0, 1.0]]) == (1.0, [0, 1])
    assert bottleneck_matching([[5.0, 1.0], [1.0, 5.0]]) == (1.0, [1, 0])


def test_ties_resolve_to_lexicographically_smallest():
    value, perm = bottleneck_matching(np.ones((3, 3)))
    assert value == 1.0
    assert perm == [0, 1, 2]


def test_matches_bruteforce_on_random_costs():
    gen = np.random.default_rng(11)
    for k in (1, 2, 3, 5, 6):
        for _ in range(20):
            cost = gen.integers(0, 4, size=(k, k)).astype(float)
            assert bottleneck_matching(cost) == bottleneck_bruteforce(cost)


def test_bruteforce_limit():
    with pytest.raises(TooLarge):
        bottleneck_bruteforce(np.zeros((9, 9)))


def test_invalid_costs():
    with pytest.raises(ValueError):
        bottleneck_matching(np.zeros((2, 3)))
    with pytest.raises(ValueError):
        bottleneck_matching([[-1.0]])
    with pytest.raises(ValueError):
        bottleneck_matching([[np.inf]])


def test_has_perfect_matching():
    assert has_perfect_matching(np.eye(3, dtype=bool))
    assert not has_perfect_matching(np.array([[True, True], [False, False]]))
    assert not has_perfect_matching(np.array([[True, False], [True, False]]))


def test_dist_k_is_order_invariant():
    def gap(a, b):
        return abs(a - b)

    assert dist_k([1.0, 5.0], [5.5, 1.2], gap) == pytest.approx(0.5)
    assert dist_k([5.0, 1.0], [5.5, 1.2], gap) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        dist_k([1.0], [1.0, 2.0], gap)


@pytest.mark.parametrize(
    "element_dist, z",
    [
        (lambda a, b: abs(a - b), 1.0),
        # squared gaps only satisfy the 1-restricted inequality with z = 2
        (lambda a, b: (a - b) ** 2, 2.0),
    ],
)
def test_dist_k_inherits_restricted_triangle(element_dist, z):
    gen = np.random.default_rng(17)
    for k in (1, 2, 3, 4):
        tuples = [list(gen.uniform(0.0, 1.5, size=k)) for _ in range(12)]
        table = np.array([[dist_k(a, b, element_dist) for b in tuples] for a in tuples])
        assert triangle_violations(table, SemimetricParams(r=1.0, z=z)) == []
        assert np.count_nonzero(table <= 1.0) > table.size // 2
