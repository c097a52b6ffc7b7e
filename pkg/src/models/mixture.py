# src/models/mixture.py

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from config.config import config, NumericsConfig
from src.linalg.symmetric import as_sym_matrix, is_spd
from src.utils.errors import DegenerateWeights, DimensionMismatch, InvalidGmm


@dataclass(frozen=True, eq=False)
class Component:
    """One Gaussian mixture component (w, mu, sigma)."""

    w: float
    mu: NDArray[np.float64]
    sigma: NDArray[np.float64]

    @classmethod
    def build(
        cls,
        w: float,
        mu: ArrayLike,
        sigma: ArrayLike,
        numerics: Optional[NumericsConfig] = None,
        check_weight: bool = True,
    ) -> "Component":
        w = float(w)
        mu = np.array(mu, dtype=np.float64).reshape(-1)
        try:
            sigma = as_sym_matrix(sigma, numerics)
        except ValueError as e:
            raise InvalidGmm(f"Invalid covariance: {e}") from e
        if sigma.shape[0] != mu.shape[0]:
            raise DimensionMismatch(
                f"Mean has dimension {mu.shape[0]} but covariance is {sigma.shape}"
            )
        if not np.isfinite(w) or (check_weight and not 0.0 <= w <= 1.0) or w < 0.0:
            raise InvalidGmm(f"Component weight {w} outside [0, 1]")
        if not np.all(np.isfinite(mu)):
            raise InvalidGmm("Component mean has non-finite entries")
        if not is_spd(sigma, numerics):
            raise InvalidGmm("Component covariance is not positive definite")
        mu.setflags(write=False)
        sigma.setflags(write=False)
        return cls(w=w, mu=mu, sigma=sigma)

    @property
    def dim(self) -> int:
        return int(self.mu.shape[0])

    def with_weight(self, w: float) -> "Component":
        return Component(w=float(w), mu=self.mu, sigma=self.sigma)

    def same_as(self, other: "Component") -> bool:
        return (
            self.w == other.w
            and np.array_equal(self.mu, other.mu)
            and np.array_equal(self.sigma, other.sigma)
        )


@dataclass(frozen=True, eq=False)
class Gmm:
    """An ordered k-tuple of components whose weights sum to one."""

    components: Tuple[Component, ...]

    def __post_init__(self):
        if len(self.components) < 1:
            raise InvalidGmm("A mixture needs at least one component")
        dims = {c.dim for c in self.components}
        if len(dims) != 1:
            raise DimensionMismatch(f"Components have mixed dimensions {sorted(dims)}")

    @classmethod
    def from_components(
        cls, components: Iterable[Component], numerics: Optional[NumericsConfig] = None
    ) -> "Gmm":
        num = numerics if numerics is not None else config.numerics
        components = tuple(components)
        total = sum(c.w for c in components)
        if abs(total - 1.0) > num.weight_sum_tol:
            raise InvalidGmm(f"Mixture weights sum to {total!r}, not 1")
        return cls(components=components)

    @classmethod
    def normalized(
        cls, components: Iterable[Component], numerics: Optional[NumericsConfig] = None
    ) -> "Gmm":
        """Builder for raw (unnormalized) weight lists."""
        num = numerics if numerics is not None else config.numerics
        components = tuple(components)
        total = sum(c.w for c in components)
        if not total > num.degenerate_weight_sum:
            raise DegenerateWeights(f"Weight sum {total!r} is not positive")
        return cls(components=tuple(c.with_weight(c.w / total) for c in components))

    @classmethod
    def from_arrays(
        cls,
        weights: ArrayLike,
        means: ArrayLike,
        covariances: ArrayLike,
        numerics: Optional[NumericsConfig] = None,
    ) -> "Gmm":
        weights = np.asarray(weights, dtype=np.float64)
        means = np.asarray(means, dtype=np.float64)
        covariances = np.asarray(covariances, dtype=np.float64)
        if not (len(weights) == len(means) == len(covariances)):
            raise DimensionMismatch("weights, means and covariances disagree on k")
        return cls.from_components(
            (
                Component.build(w, mu, sigma, numerics)
                for w, mu, sigma in zip(weights, means, covariances)
            ),
            numerics,
        )

    @property
    def k(self) -> int:
        return len(self.components)

    @property
    def d(self) -> int:
        return self.components[0].dim

    @property
    def weights(self) -> NDArray[np.float64]:
        return np.array([c.w for c in self.components])

    @property
    def means(self) -> NDArray[np.float64]:
        return np.stack([c.mu for c in self.components])

    @property
    def covariances(self) -> NDArray[np.float64]:
        return np.stack([c.sigma for c in self.components])

    def permuted(self, perm: Sequence[int]) -> "Gmm":
        if sorted(perm) != list(range(self.k)):
            raise ValueError(f"{list(perm)} is not a permutation of range({self.k})")
        return Gmm(components=tuple(self.components[i] for i in perm))

    def same_as(self, other: "Gmm") -> bool:
        return self.k == other.k and all(
            a.same_as(b) for a, b in zip(self.components, other.components)
        )


def check_compatible(a: Gmm, b: Gmm) -> None:
    if a.k != b.k or a.d != b.d:
        raise DimensionMismatch(
            f"Mixtures differ in shape: (k={a.k}, d={a.d}) vs (k={b.k}, d={b.d})"
        )
