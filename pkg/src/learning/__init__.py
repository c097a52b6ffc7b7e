# src/learning/__init__.py

"""
Learning Package

Non-private mixture tooling: datasets, synthetic mixtures, and the EM learner.
"""

from .dataset import Dataset
from .synthesis import make_separated_gmm, sample_gmm
from .em import EmResult, LearnerOptions, em_fit, em_fit_detailed

__all__ = [
    "Dataset",
    "EmResult",
    "LearnerOptions",
    "em_fit",
    "em_fit_detailed",
    "make_separated_gmm",
    "sample_gmm",
]
