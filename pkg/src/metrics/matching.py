# src/metrics/matching.py

"""
Bottleneck assignment: the permutation minimizing the largest selected cost.

The optimal value is found by binary search over the sorted distinct costs,
checking at each threshold whether the bipartite graph of admissible edges has
a perfect matching (Hopcroft-Karp from scipy.sparse.csgraph). Among optimal
permutations the lexicographically smallest is returned.
"""

import itertools
from typing import Callable, List, Sequence, Tuple, TypeVar

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from config.config import config
from src.utils.errors import TooLarge

T = TypeVar("T")


def _validate_cost(cost: ArrayLike) -> NDArray[np.float64]:
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1] or cost.shape[0] < 1:
        raise ValueError(f"Cost matrix must be square and non-empty, got {cost.shape}")
    if not np.all(np.isfinite(cost)) or np.any(cost < 0):
        raise ValueError("Cost matrix entries must be finite and nonnegative")
    return cost


def has_perfect_matching(admissible: NDArray[np.bool_]) -> bool:
    """Whether the bipartite graph given by a boolean biadjacency matrix is perfectly matchable."""
    rows, cols = admissible.shape
    if rows != cols:
        return False
    if rows == 0:
        return True
    if not admissible.any(axis=1).all() or not admissible.any(axis=0).all():
        return False
    graph = csr_matrix(admissible.astype(np.int8))
    matched = maximum_bipartite_matching(graph, perm_type="column")
    return bool(np.all(matched >= 0))


def _lexicographic_matching(admissible: NDArray[np.bool_]) -> List[int]:
    size = admissible.shape[0]
    free_cols = list(range(size))
    perm: List[int] = []
    for row in range(size):
        for col in free_cols:
            if not admissible[row, col]:
                continue
            rest_cols = [c for c in free_cols if c != col]
            if has_perfect_matching(admissible[np.ix_(range(row + 1, size), rest_cols)]):
                perm.append(col)
                free_cols = rest_cols
                break
        else:
            raise AssertionError("Admissible graph lost its perfect matching")
    return perm


def bottleneck_matching(cost: ArrayLike) -> Tuple[float, List[int]]:
    """
    Return (value, perm) where perm minimizes max_i cost[i][perm[i]] and value is
    that minimum.
    """
    cost = _validate_cost(cost)
    thresholds = np.unique(cost)

    lo, hi = 0, len(thresholds) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if has_perfect_matching(cost <= thresholds[mid]):
            hi = mid
        else:
            lo = mid + 1

    value = float(thresholds[lo])
    perm = _lexicographic_matching(cost <= value)
    return value, perm


def dist_k(
    left: Sequence[T], right: Sequence[T], dist: Callable[[T, T], float]
) -> float:
    """Permutation-invariant lift of an element distance to k-tuples."""
    if len(left) != len(right):
        raise ValueError("Tuples must have equal length")
    cost = [[dist(a, b) for b in right] for a in left]
    return bottleneck_matching(cost)[0]


def bottleneck_bruteforce(cost: ArrayLike) -> Tuple[float, List[int]]:
    """Enumerate every permutation; test oracle for small k only."""
    cost = _validate_cost(cost)
    size = cost.shape[0]
    if size > config.numerics.bruteforce_max_k:
        raise TooLarge(
            f"Brute force over {size}! permutations exceeds k <= {config.numerics.bruteforce_max_k}"
        )
    rows = np.arange(size)
    best_value, best_perm = np.inf, None
    for perm in itertools.permutations(range(size)):
        value = cost[rows, perm].max()
        if value < best_value:
            best_value, best_perm = value, list(perm)
    return float(best_value), best_perm
