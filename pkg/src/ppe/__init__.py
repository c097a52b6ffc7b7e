# src/ppe/__init__.py

"""
PPE Package

Threshold and subset-count calibration, composition, the generic populous
estimator, and the private mixture fitting pipeline.
"""

from .calibration import (
    CalibrationInput,
    PpeConfig,
    calibrate_gamma,
    calibrate_mask_config,
    component_concentration_radius,
    compose_concentration,
    compose_epsilon,
    compose_masking,
    min_subsets,
    ppe_privacy_guarantee,
    ppe_threshold,
    utility_radius_ok,
)
from .estimator import PpeOutcome, pairwise_from_dist, populous_scores, ppe_run
from .pipeline import RunRecord, fit_gmm_private, masking_input

__all__ = [
    "CalibrationInput",
    "PpeConfig",
    "PpeOutcome",
    "RunRecord",
    "calibrate_gamma",
    "calibrate_mask_config",
    "component_concentration_radius",
    "compose_concentration",
    "compose_epsilon",
    "compose_masking",
    "fit_gmm_private",
    "masking_input",
    "min_subsets",
    "pairwise_from_dist",
    "populous_scores",
    "ppe_privacy_guarantee",
    "ppe_threshold",
    "utility_radius_ok",
]
