# src/randomness/__init__.py

"""
Randomness Package

Reproducible, splittable random streams and the noise distributions used by the
masking and estimation code.
"""

from .streams import RandomStream
from .noise import (
    TLapParams,
    gaussian_matrix,
    gaussian_with_cov,
    std_normal,
    tlap_bound,
    tlap_cdf,
    tlap_sample,
)

__all__ = [
    "RandomStream",
    "TLapParams",
    "gaussian_matrix",
    "gaussian_with_cov",
    "std_normal",
    "tlap_bound",
    "tlap_cdf",
    "tlap_sample",
]
