# src/masking/__init__.py

"""
Masking Package

Weight, mean and covariance noise, the per-component masker, the k-tuple lift
with random shuffling, and the mixture masker.
"""

from .maskers import (
    GmmMasker,
    MaskConfig,
    MaskingMechanism,
    lift_masker,
    mask_component,
    mask_cov,
    mask_gmm,
    mask_mean,
    mask_weight,
)

__all__ = [
    "GmmMasker",
    "MaskConfig",
    "MaskingMechanism",
    "lift_masker",
    "mask_component",
    "mask_cov",
    "mask_gmm",
    "mask_mean",
    "mask_weight",
]
