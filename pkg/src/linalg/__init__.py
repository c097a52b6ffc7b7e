# src/linalg/__init__.py

"""
Linear Algebra Package

Symmetric-matrix primitives used by the distance and masking code.
"""

from .symmetric import (
    SymMatrix,
    as_sym_matrix,
    cholesky,
    frob_norm,
    inv_sqrt,
    is_spd,
    psd_sqrt,
    symmetrize,
)

__all__ = [
    "SymMatrix",
    "as_sym_matrix",
    "cholesky",
    "frob_norm",
    "inv_sqrt",
    "is_spd",
    "psd_sqrt",
    "symmetrize",
]
