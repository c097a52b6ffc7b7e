# src/audit/__init__.py

"""
Audit Package

Monte-Carlo checks of masking concentration, histogram lower bounds on masking
privacy loss, and sampled restricted triangle inequalities.
"""

from .reports import AuditReport
from .samplers import CollinearTripleSampler, RestrictedTripleSampler, perturb_gmm, random_gmm
from .auditors import (
    audit_concentration,
    audit_indistinguishability,
    audit_triangle,
    log_ratio_epsilon,
    merged_histograms,
    projections,
)

__all__ = [
    "AuditReport",
    "CollinearTripleSampler",
    "RestrictedTripleSampler",
    "audit_concentration",
    "audit_indistinguishability",
    "audit_triangle",
    "log_ratio_epsilon",
    "merged_histograms",
    "perturb_gmm",
    "projections",
    "random_gmm",
]
