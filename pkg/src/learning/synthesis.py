# src/learning/synthesis.py

from typing import Tuple, Union

import numpy as np
from numpy.typing import NDArray
from scipy.stats import special_ortho_group

from config.config import config
from src.learning.dataset import Dataset
from src.linalg.symmetric import cholesky
from src.models.mixture import Component, Gmm
from src.randomness.streams import RandomStream
from src.utils.logging import Logger

logger = Logger.get_logger("SynthesisLogger", config.paths.log_dir / "synthesis.log")


def sample_gmm(
    g: Gmm, n: int, stream: RandomStream, return_labels: bool = False
) -> Union[Dataset, Tuple[Dataset, NDArray[np.int64]]]:
    """n i.i.d. draws: label ~ Categorical(w), point ~ N(mu_label, sigma_label)."""
    if n < 0:
        raise ValueError(f"Sample count must be nonnegative, got {n}")
    gen = stream.generator()
    weights = g.weights / g.weights.sum()
    labels = gen.choice(g.k, size=n, p=weights)
    noise = gen.standard_normal((n, g.d))
    factors = np.stack([cholesky(c.sigma) for c in g.components])
    points = g.means[labels] + np.einsum("nij,nj->ni", factors[labels], noise)
    points.setflags(write=False)
    dataset = Dataset(points=points)
    return (dataset, labels) if return_labels else dataset


def _simplex_vertices(k: int, side: float) -> NDArray[np.float64]:
    """k points in R^(k-1) at mutual distance ``side``, centered at the origin."""
    if k == 1:
        return np.zeros((1, 0))
    vertices = np.eye(k) * side / np.sqrt(2.0)
    vertices -= vertices.mean(axis=0)
    # orthonormal basis of the hyperplane the centered vertices span
    _, _, vt = np.linalg.svd(vertices)
    return vertices @ vt[: k - 1].T


def make_separated_gmm(
    k: int, d: int, separation: float, stream: RandomStream
) -> Gmm:
    """
    Equal-weight mixture with identity covariances whose means are pairwise at
    least ``separation`` apart: a randomly rotated regular simplex when it fits in
    d dimensions, evenly spaced points on a random line otherwise.
    """
    if k < 1 or d < 1:
        raise ValueError(f"Need k >= 1 and d >= 1, got k={k}, d={d}")
    if not separation > 0:
        raise ValueError(f"Separation must be positive, got {separation}")
    gen = stream.generator()
    side = separation * (1.0 + 1e-9)

    if k - 1 <= d:
        means = np.zeros((k, d))
        means[:, : k - 1] = _simplex_vertices(k, side)
    else:
        direction = np.zeros(d)
        direction[0] = 1.0
        means = np.outer(np.arange(k) - (k - 1) / 2.0, direction) * side

    if d > 1:
        rotation = special_ortho_group.rvs(d, random_state=gen)
        means = means @ rotation.T

    logger.debug(f"Built separated mixture k={k}, d={d}, separation={separation}")
    return Gmm.from_components(
        Component.build(1.0 / k, mu, np.eye(d)) for mu in means
    )
