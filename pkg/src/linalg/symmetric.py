# src/linalg/symmetric.py

"""
Dense symmetric-matrix kernel: square roots, inverse square roots, Cholesky
factors and Frobenius norms. Every function is pure and thread-safe.
"""

from typing import Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import linalg

from config.config import config, NumericsConfig
from src.utils.errors import DimensionMismatch, NotPsd, Singular

SymMatrix = NDArray[np.float64]


def _numerics(numerics: Optional[NumericsConfig]) -> NumericsConfig:
    return numerics if numerics is not None else config.numerics


def as_sym_matrix(
    entries: ArrayLike, numerics: Optional[NumericsConfig] = None
) -> SymMatrix:
    """Validate a square, finite, symmetric matrix and return it as float64."""
    tol = _numerics(numerics).symmetry_tol
    matrix = np.array(entries, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] < 1:
        raise DimensionMismatch(f"Expected a square matrix, got shape {matrix.shape}")
    if not np.all(np.isfinite(matrix)):
        raise ValueError("Matrix has non-finite entries")
    scale = np.maximum(1.0, np.abs(matrix))
    if np.any(np.abs(matrix - matrix.T) > tol * scale):
        raise ValueError("Matrix is not symmetric")
    return matrix


def symmetrize(matrix: NDArray[np.float64]) -> SymMatrix:
    return 0.5 * (matrix + matrix.T)


def frob_norm(matrix: ArrayLike) -> float:
    return float(np.linalg.norm(np.asarray(matrix, dtype=np.float64), "fro"))


def _eigh(sym: SymMatrix):
    # LAPACK syevd: tridiagonalization followed by divide and conquer
    return np.linalg.eigh(sym)


def psd_sqrt(sym: ArrayLike, numerics: Optional[NumericsConfig] = None) -> SymMatrix:
    """
    Principal square root of a PSD matrix. Eigenvalues in
    [-psd_clamp_tol * ||S||_F, 0) are clamped to zero; anything lower raises NotPsd.
    """
    num = _numerics(numerics)
    sym = as_sym_matrix(sym, num)
    eigvals, eigvecs = _eigh(sym)
    floor = -num.psd_clamp_tol * frob_norm(sym)
    if eigvals[0] < floor:
        raise NotPsd(
            f"Smallest eigenvalue {eigvals[0]:.3e} is below the clamp tolerance {floor:.3e}"
        )
    roots = np.sqrt(np.clip(eigvals, 0.0, None))
    return symmetrize((eigvecs * roots) @ eigvecs.T)


def inv_sqrt(sym: ArrayLike, numerics: Optional[NumericsConfig] = None) -> SymMatrix:
    """Inverse principal square root of a symmetric positive definite matrix."""
    num = _numerics(numerics)
    sym = as_sym_matrix(sym, num)
    eigvals, eigvecs = _eigh(sym)
    floor = num.inv_sqrt_floor * frob_norm(sym)
    if eigvals[0] < floor or eigvals[0] <= 0.0:
        raise Singular(
            f"Smallest eigenvalue {eigvals[0]:.3e} is below the floor {floor:.3e}"
        )
    return symmetrize((eigvecs / np.sqrt(eigvals)) @ eigvecs.T)


def cholesky(sym: ArrayLike, numerics: Optional[NumericsConfig] = None) -> NDArray[np.float64]:
    """Lower-triangular L with positive diagonal and L @ L.T == S."""
    num = _numerics(numerics)
    sym = as_sym_matrix(sym, num)
    dim = sym.shape[0]
    pivot_floor = num.cholesky_pivot_floor * np.trace(sym) / dim
    try:
        lower = linalg.cholesky(sym, lower=True, check_finite=False)
    except linalg.LinAlgError as e:
        raise Singular(f"Cholesky factorization failed: {e}") from e
    pivots = np.diag(lower) ** 2
    if pivot_floor <= 0.0 or np.any(pivots < pivot_floor):
        raise Singular(
            f"Cholesky pivot {pivots.min():.3e} fell below {pivot_floor:.3e}"
        )
    return lower


def is_spd(sym: ArrayLike, numerics: Optional[NumericsConfig] = None) -> bool:
    try:
        inv_sqrt(sym, numerics)
    except (Singular, ValueError, DimensionMismatch):
        return False
    return True
