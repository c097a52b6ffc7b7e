# src/randomness/noise.py

import math
from typing import Optional, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.linalg.symmetric import cholesky
from src.randomness.streams import RandomStream


class TLapParams(BaseModel):
    """Truncated Laplace parameters: sensitivity, epsilon, delta."""

    model_config = ConfigDict(frozen=True)

    delta_sens: float = Field(gt=0)
    epsilon: float = Field(gt=0)
    delta: float = Field(gt=0, lt=1)

    @model_validator(mode="after")
    def _finite(self):
        if not all(map(math.isfinite, (self.delta_sens, self.epsilon, self.delta))):
            raise ValueError("TLap parameters must be finite")
        return self

    @property
    def scale(self) -> float:
        return self.delta_sens / self.epsilon


def std_normal(stream: RandomStream, n: int) -> NDArray[np.float64]:
    if n < 0:
        raise ValueError(f"Sample count must be nonnegative, got {n}")
    return stream.generator().standard_normal(n)


def gaussian_matrix(stream: RandomStream, d: int) -> NDArray[np.float64]:
    if d < 1:
        raise ValueError(f"Dimension must be positive, got {d}")
    return stream.generator().standard_normal((d, d))


def gaussian_with_cov(
    stream: RandomStream, sigma: ArrayLike, size: Optional[int] = None
) -> NDArray[np.float64]:
    """
    Draw from N(0, sigma) as L @ z with L the Cholesky factor. With ``size`` the
    result has shape (size, d); otherwise a single d-vector.
    """
    lower = cholesky(sigma)
    dim = lower.shape[0]
    gen = stream.generator()
    if size is None:
        return lower @ gen.standard_normal(dim)
    return gen.standard_normal((size, dim)) @ lower.T


def tlap_bound(p: TLapParams) -> float:
    """
    Truncation half-width A = (sens/eps) * ln(1 + (e^eps - 1) / (2 delta)).

    This is the single place that fixes the truncation constant; the PPE
    failure threshold is 0.8 + A at sensitivity 2/t.
    """
    return p.scale * math.log1p(math.expm1(p.epsilon) / (2.0 * p.delta))


def tlap_cdf(x: Union[float, ArrayLike], p: TLapParams) -> Union[float, NDArray[np.float64]]:
    """CDF of Laplace(0, sens/eps) conditioned on [-A, A]."""
    scale = p.scale
    bound = tlap_bound(p)
    tail = 0.5 * math.exp(-bound / scale)
    mass = 1.0 - 2.0 * tail
    x = np.clip(np.asarray(x, dtype=np.float64), -bound, bound)
    untruncated = np.where(
        x < 0, 0.5 * np.exp(x / scale), 1.0 - 0.5 * np.exp(-x / scale)
    )
    result = np.clip((untruncated - tail) / mass, 0.0, 1.0)
    return float(result) if result.ndim == 0 else result


def tlap_sample(
    stream: RandomStream, p: TLapParams, size: Optional[int] = None
) -> Union[float, NDArray[np.float64]]:
    """Inverse-CDF draw(s) from the truncated Laplace distribution."""
    scale = p.scale
    bound = tlap_bound(p)
    tail = 0.5 * math.exp(-bound / scale)
    mass = 1.0 - 2.0 * tail

    u = stream.generator().random(size)
    prob = tail + np.asarray(u) * mass
    lower_half = prob < 0.5
    safe_low = np.where(lower_half, prob, 0.25)
    safe_high = np.where(lower_half, 0.75, prob)
    draws = np.where(
        lower_half,
        scale * np.log(2.0 * safe_low),
        -scale * np.log(2.0 * (1.0 - safe_high)),
    )
    draws = np.clip(draws, -bound, bound)
    return float(draws) if size is None else draws
