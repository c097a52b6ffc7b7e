# src/audit/samplers.py

"""Random mixtures and mixture triples for the sampled audits."""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from src.linalg.symmetric import psd_sqrt, symmetrize
from src.masking.maskers import MaskConfig, mask_component
from src.models.mixture import Component, Gmm
from src.randomness.streams import RandomStream

Triple = Tuple[Gmm, Gmm, Gmm]


def random_gmm(k: int, d: int, stream: RandomStream, spread: float = 3.0) -> Gmm:
    """Dirichlet(1) weights, Gaussian means, covariances A A^T / d + I/2."""
    if k < 1 or d < 1:
        raise ValueError(f"Need k >= 1 and d >= 1, got k={k}, d={d}")
    gen = stream.generator()
    weights = gen.dirichlet(np.ones(k))
    means = gen.standard_normal((k, d)) * spread
    components = []
    for w, mu in zip(weights, means):
        a = gen.standard_normal((d, d))
        sigma = symmetrize(a @ a.T / d + 0.5 * np.eye(d))
        components.append(Component.build(w, mu, sigma, check_weight=False))
    return Gmm.normalized(components)


def perturb_gmm(base: Gmm, scale: float, stream: RandomStream) -> Gmm:
    """
    Masker-style noise of size `scale` on every component, keeping the component
    order. Weights move ten times less than means and covariances.
    """
    cfg = MaskConfig(eta_w=0.1 * scale, eta_mean=scale, eta_cov=scale)
    return Gmm.normalized(
        mask_component(c, cfg, stream.child("component", i))
        for i, c in enumerate(base.components)
    )


@dataclass(frozen=True)
class RestrictedTripleSampler:
    """
    Proposes three independent perturbations of a random base mixture. Whether
    a proposal is restricted (both legs within r) is decided by the audit.
    """

    k: int = 2
    d: int = 2
    max_scale: Optional[float] = None

    def __call__(self, stream: RandomStream) -> Triple:
        base = random_gmm(self.k, self.d, stream.child("base"))
        top = self.max_scale if self.max_scale is not None else 0.3 / self.d
        scales = stream.child("scale").generator().uniform(0.0, top, size=3)
        f1, f2, f3 = (
            perturb_gmm(base, float(s), stream.child("perturb", i))
            for i, s in enumerate(scales)
        )
        return f1, f2, f3


@dataclass(frozen=True)
class CollinearTripleSampler:
    """
    F2 sits midway between F1 and F3: every mean moves by `step` Mahalanobis
    units along a shared random direction, twice for F3.
    """

    k: int = 2
    d: int = 2
    step: float = 0.2

    def __call__(self, stream: RandomStream) -> Triple:
        base = random_gmm(self.k, self.d, stream.child("base"))
        u = stream.child("direction").generator().standard_normal(self.d)
        u /= np.linalg.norm(u)
        shifts = [psd_sqrt(c.sigma) @ u * self.step for c in base.components]

        def moved(times: int) -> Gmm:
            return Gmm.from_components(
                Component.build(c.w, c.mu + times * shift, c.sigma)
                for c, shift in zip(base.components, shifts)
            )

        return base, moved(1), moved(2)
