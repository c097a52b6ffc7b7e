# src/metrics/distances.py

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field

from config.config import config, NumericsConfig
from src.linalg.symmetric import frob_norm, inv_sqrt
from src.metrics.matching import bottleneck_bruteforce, bottleneck_matching
from src.models.mixture import Component, Gmm, check_compatible
from src.utils.errors import DimensionMismatch, TooLarge
from src.utils.logging import Logger

logger = Logger.get_logger("MetricsLogger", config.paths.log_dir / "metrics.log")


class SemimetricParams(BaseModel):
    """Radius r and factor z of a restricted approximate triangle inequality."""

    model_config = ConfigDict(frozen=True)

    r: float = Field(gt=0)
    z: float = Field(ge=1)


@dataclass(frozen=True)
class _Whitened:
    """A component together with its inverse covariance square root."""

    w: float
    mu: NDArray[np.float64]
    sigma: NDArray[np.float64]
    white: NDArray[np.float64]


def _whiten(c: Component, numerics: Optional[NumericsConfig]) -> _Whitened:
    return _Whitened(w=c.w, mu=c.mu, sigma=c.sigma, white=inv_sqrt(c.sigma, numerics))


def _directed_terms(a: _Whitened, b: _Whitened) -> tuple:
    identity = np.eye(a.mu.shape[0])
    mean_term = float(np.linalg.norm(a.white @ (a.mu - b.mu)))
    cov_term = frob_norm(a.white @ b.sigma @ a.white - identity)
    return mean_term, cov_term


def _dist_whitened(a: _Whitened, b: _Whitened) -> float:
    if a.mu.shape != b.mu.shape:
        raise DimensionMismatch(
            f"Components have dimensions {a.mu.shape[0]} and {b.mu.shape[0]}"
        )
    # identical parameters are at distance exactly zero, free of round-off
    if a.w == b.w and np.array_equal(a.mu, b.mu) and np.array_equal(a.sigma, b.sigma):
        return 0.0
    mean_ab, cov_ab = _directed_terms(a, b)
    mean_ba, cov_ba = _directed_terms(b, a)
    return max(abs(a.w - b.w), max(mean_ab, mean_ba), max(cov_ab, cov_ba))


def dist_comp(
    a: Component, b: Component, numerics: Optional[NumericsConfig] = None
) -> float:
    """
    Component distance: the largest of the weight gap |w_a - w_b|, the
    Mahalanobis mean gap measured under either covariance, and the relative
    covariance deviation ||S_a^{-1/2} S_b S_a^{-1/2} - I||_F under either ordering.
    """
    return _dist_whitened(_whiten(a, numerics), _whiten(b, numerics))


def _cost_matrix(
    left: Sequence[_Whitened], right: Sequence[_Whitened]
) -> NDArray[np.float64]:
    return np.array([[_dist_whitened(a, b) for b in right] for a in left])


def component_cost_matrix(
    a: Gmm, b: Gmm, numerics: Optional[NumericsConfig] = None
) -> NDArray[np.float64]:
    check_compatible(a, b)
    return _cost_matrix(
        [_whiten(c, numerics) for c in a.components],
        [_whiten(c, numerics) for c in b.components],
    )


def dist_mixture(a: Gmm, b: Gmm, numerics: Optional[NumericsConfig] = None) -> float:
    """Bottleneck (min over relabelings of max component distance) mixture distance."""
    return bottleneck_matching(component_cost_matrix(a, b, numerics))[0]


def dist_mixture_bruteforce(
    a: Gmm, b: Gmm, numerics: Optional[NumericsConfig] = None
) -> float:
    num = numerics if numerics is not None else config.numerics
    if a.k > num.bruteforce_max_k:
        raise TooLarge(f"k = {a.k} exceeds the brute-force limit {num.bruteforce_max_k}")
    return bottleneck_bruteforce(component_cost_matrix(a, b, numerics))[0]


def pairwise_mixture_distances(
    mixtures: Sequence[Optional[Gmm]],
    numerics: Optional[NumericsConfig] = None,
    max_workers: int = 1,
) -> NDArray[np.float64]:
    """
    Symmetric matrix of dist_mixture over all pairs. Missing mixtures (None) are
    at infinite distance from everything but themselves.
    """
    count = len(mixtures)
    prepared: List[Optional[List[_Whitened]]] = [
        None if g is None else [_whiten(c, numerics) for c in g.components]
        for g in mixtures
    ]
    result = np.zeros((count, count))

    def row(i: int) -> List[float]:
        values = []
        for j in range(i + 1, count):
            if prepared[i] is None or prepared[j] is None:
                values.append(math.inf)
            else:
                cost = _cost_matrix(prepared[i], prepared[j])
                values.append(bottleneck_matching(cost)[0])
        return values

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(row, range(count)))
    else:
        rows = [row(i) for i in range(count)]

    for i, values in enumerate(rows):
        result[i, i + 1 :] = values
        result[i + 1 :, i] = values
    logger.debug(f"Computed {count * (count - 1) // 2} pairwise mixture distances")
    return result


def check_restricted_triangle(
    d12: float,
    d23: float,
    d13: float,
    params: SemimetricParams,
    numerics: Optional[NumericsConfig] = None,
) -> bool:
    """True iff the r-restricted z-approximate triangle inequality holds for this triple."""
    num = numerics if numerics is not None else config.numerics
    if d12 > params.r or d23 > params.r:
        return True
    return d13 <= params.z * (d12 + d23) + num.triangle_slack


def triangle_violations(
    table: NDArray[np.float64], params: SemimetricParams
) -> List[tuple]:
    """All ordered triples (i, j, l) of a distance table violating the inequality."""
    size = table.shape[0]
    return [
        (i, j, l)
        for i, j, l in itertools.permutations(range(size), 3)
        if not check_restricted_triangle(table[i, j], table[j, l], table[i, l], params)
    ]
