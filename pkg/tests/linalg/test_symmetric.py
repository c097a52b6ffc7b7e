import numpy as np
import pytest

from src.linalg.symmetric import (
    as_sym_matrix,
    cholesky,
    frob_norm,
    inv_sqrt,
    is_spd,
    psd_sqrt,
)
from src.utils.errors import DimensionMismatch, NotPsd, Singular
from tests.conftest import random_spd


def test_psd_sqrt_of_diagonal():
    root = psd_sqrt(np.diag([4.0, 9.0]))
    np.testing.assert_allclose(root, np.diag([2.0, 3.0]), atol=1e-12)


def test_psd_sqrt_squares_back():
    gen = np.random.default_rng(0)
    for d in (1, 2, 5):
        s = random_spd(gen, d)
        root = psd_sqrt(s)
        np.testing.assert_allclose(root @ root, s, atol=1e-10)
        np.testing.assert_array_equal(root, root.T)


def test_psd_sqrt_clamps_tiny_negative_eigenvalue():
    root = psd_sqrt(np.diag([1.0, -1e-12]))
    np.testing.assert_allclose(root, np.diag([1.0, 0.0]), atol=1e-12)


def test_psd_sqrt_rejects_negative_matrix():
    with pytest.raises(NotPsd):
        psd_sqrt(np.diag([1.0, -1.0]))


def test_inv_sqrt_whitens():
    gen = np.random.default_rng(1)
    s = random_spd(gen, 3)
    w = inv_sqrt(s)
    np.testing.assert_allclose(w @ s @ w, np.eye(3), atol=1e-10)


def test_inv_sqrt_rejects_singular():
    with pytest.raises(Singular):
        inv_sqrt(np.array([[1.0, 0.0], [0.0, 0.0]]))


def test_cholesky_factor():
    s = np.array([[4.0, 2.0], [2.0, 3.0]])
    lower = cholesky(s)
    assert lower[0, 1] == 0.0
    assert np.all(np.diag(lower) > 0)
    np.testing.assert_allclose(lower @ lower.T, s, atol=1e-12)


def test_cholesky_rejects_singular():
    with pytest.raises(Singular):
        cholesky(np.ones((2, 2)))


def test_as_sym_matrix_validation():
    with pytest.raises(DimensionMismatch):
        as_sym_matrix(np.ones((2, 3)))
    with pytest.raises(ValueError):
        as_sym_matrix([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        as_sym_matrix([[1.0, np.nan], [np.nan, 1.0]])


def test_frob_norm_and_is_spd():
    assert frob_norm([[3.0, 4.0], [0.0, 0.0]]) == pytest.approx(5.0)
    assert is_spd(np.eye(2))
    assert not is_spd(np.diag([1.0, -1.0]))
    assert not is_spd(np.ones((2, 3)))


def test_inv_sqrt_of_diagonal():
    np.testing.assert_allclose(inv_sqrt(np.diag([4.0, 25.0])), np.diag([0.5, 0.2]), atol=1e-12)
