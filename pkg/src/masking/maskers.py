# src/masking/maskers.py

"""
Noise-adding masking mechanisms for Gaussian mixtures.

Weights get additive Gaussian noise clamped at zero, means get noise shaped by
their own covariance, and covariances are perturbed as
S^{1/2} (I + eta G)(I + eta G)^T S^{1/2}. A mixture is masked by shuffling its
components with a uniform permutation, masking each one on its own sub-stream,
then renormalizing the weights.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterator, List, Protocol, Sequence, TypeVar

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from config.config import config
from src.linalg.symmetric import is_spd, psd_sqrt, symmetrize
from src.models.mixture import Component, Gmm
from src.randomness.noise import gaussian_matrix, gaussian_with_cov, std_normal
from src.randomness.streams import RandomStream
from src.utils.errors import DegenerateWeights, Singular
from src.utils.logging import Logger

logger = Logger.get_logger("MaskingLogger", config.paths.log_dir / "masking.log")

T = TypeVar("T")
Y = TypeVar("Y")


class MaskConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    eta_w: float = Field(ge=0)
    eta_mean: float = Field(ge=0)
    eta_cov: float = Field(ge=0)

    @model_validator(mode="after")
    def _finite(self):
        if not all(map(math.isfinite, (self.eta_w, self.eta_mean, self.eta_cov))):
            raise ValueError("Noise scales must be finite")
        return self

    @classmethod
    def zero(cls) -> "MaskConfig":
        return cls(eta_w=0.0, eta_mean=0.0, eta_cov=0.0)


class MaskingMechanism(Protocol[Y]):
    def __call__(self, value: Y, stream: RandomStream) -> Y: ...


def mask_weight(w: float, eta_w: float, stream: RandomStream) -> float:
    g = std_normal(stream, 1)[0]
    return max(0.0, w + eta_w * g)


def mask_mean(
    mu: ArrayLike, sigma: ArrayLike, eta_mean: float, stream: RandomStream
) -> NDArray[np.float64]:
    mu = np.asarray(mu, dtype=np.float64)
    return mu + eta_mean * gaussian_with_cov(stream, sigma)


def mask_cov(
    sigma: ArrayLike, eta_cov: float, stream: RandomStream
) -> NDArray[np.float64]:
    root = psd_sqrt(sigma)
    dim = root.shape[0]
    factor = root @ (np.eye(dim) + eta_cov * gaussian_matrix(stream, dim))
    masked = symmetrize(factor @ factor.T)
    assert np.linalg.eigvalsh(masked)[0] >= -1e-10 * max(1.0, np.abs(masked).max()), (
        "Masked covariance left the PSD cone"
    )
    return masked


def mask_component(c: Component, cfg: MaskConfig, stream: RandomStream) -> Component:
    """
    Mask weight, mean and covariance on independent sub-streams; the weight is
    left unnormalized. Raises Singular when the masked covariance is not positive definite.
    """
    w = mask_weight(c.w, cfg.eta_w, stream.child("weight"))
    mu = mask_mean(c.mu, c.sigma, cfg.eta_mean, stream.child("mean"))
    sigma = mask_cov(c.sigma, cfg.eta_cov, stream.child("cov"))
    if not is_spd(sigma):
        raise Singular("Masked covariance is not positive definite")
    mu.setflags(write=False)
    sigma.setflags(write=False)
    return Component(w=w, mu=mu, sigma=sigma)


def lift_masker(
    component_masker: Callable[[T, RandomStream], T],
    k: int,
    mixture: Sequence[T],
    stream: RandomStream,
    max_workers: int = 1,
) -> List[T]:
    """
    Apply a per-element masker to a k-tuple after a uniform random shuffle.
    Element i of the output is the masked version of mixture[sigma(i)], drawn on
    sub-stream ("component", i).
    """
    if k < 1 or len(mixture) != k:
        raise ValueError(f"Expected a {k}-tuple, got {len(mixture)} elements")
    # Generator.permutation is a Fisher-Yates shuffle
    sigma = stream.child("permutation").generator().permutation(k)

    def mask_one(i: int) -> T:
        return component_masker(mixture[sigma[i]], stream.child("component", i))

    if max_workers > 1 and k > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(mask_one, range(k)))
    return [mask_one(i) for i in range(k)]


def mask_gmm(
    g: Gmm, cfg: MaskConfig, stream: RandomStream, max_workers: int = 1
) -> Gmm:
    """Shuffle and mask every component, then renormalize the weights."""
    raw = lift_masker(
        lambda c, s: mask_component(c, cfg, s),
        g.k,
        g.components,
        stream,
        max_workers=max_workers,
    )
    try:
        return Gmm.normalized(raw)
    except DegenerateWeights:
        logger.warning(f"Every masked weight of a k={g.k} mixture was clamped to zero")
        raise


class GmmMasker:
    """A mask_gmm instance with fixed noise scales, usable as a masking mechanism."""

    def __init__(self, cfg: MaskConfig, max_workers: int = 1):
        self.cfg = cfg
        self.max_workers = max_workers

    def __call__(self, g: Gmm, stream: RandomStream) -> Gmm:
        return mask_gmm(g, self.cfg, stream, max_workers=self.max_workers)

    def sample(self, g: Gmm, stream: RandomStream, trials: int) -> Iterator[Gmm]:
        """Masked copies of g on sub-streams ("trial", i), i = 0 .. trials - 1."""
        for i in range(trials):
            yield self(g, stream.child("trial", i))

    def __repr__(self) -> str:
        return f"GmmMasker({self.cfg!r})"
