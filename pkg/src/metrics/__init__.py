# src/metrics/__init__.py

"""
Metrics Package

Component and mixture distances, bottleneck matching, and semimetric checks.
"""

from .matching import bottleneck_bruteforce, bottleneck_matching, dist_k
from .distances import (
    SemimetricParams,
    check_restricted_triangle,
    component_cost_matrix,
    dist_comp,
    dist_mixture,
    dist_mixture_bruteforce,
    pairwise_mixture_distances,
    triangle_violations,
)

__all__ = [
    "SemimetricParams",
    "bottleneck_bruteforce",
    "bottleneck_matching",
    "check_restricted_triangle",
    "component_cost_matrix",
    "dist_comp",
    "dist_k",
    "dist_mixture",
    "dist_mixture_bruteforce",
    "pairwise_mixture_distances",
    "triangle_violations",
]
