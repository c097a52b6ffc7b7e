import numpy as np
import pytest

from src.learning.dataset import Dataset
from src.utils.errors import DimensionMismatch


def test_from_points_shapes():
    data = Dataset.from_points([[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]])
    assert (data.m, data.d, len(data)) == (3, 2, 3)
    assert not data.points.flags.writeable


def test_from_points_rejects_bad_input():
    with pytest.raises(DimensionMismatch):
        Dataset.from_points([])
    with pytest.raises(DimensionMismatch):
        Dataset.from_points([1.0, 2.0])
    with pytest.raises(ValueError):
        Dataset.from_points([[1.0], [np.nan]])


def test_chunks_are_positional():
    data = Dataset.from_points(np.arange(10, dtype=float).reshape(-1, 1))
    np.testing.assert_array_equal(data.chunk(1, 3).ravel(), [3.0, 4.0, 5.0])
    assert data.chunk(3, 3).shape == (1, 1)


def test_with_point_replaces_one_row():
    data = Dataset.from_points(np.zeros((4, 2)))
    neighbor = data.with_point(2, [7.0, 8.0])
    np.testing.assert_array_equal(neighbor.points[2], [7.0, 8.0])
    assert np.count_nonzero(neighbor.points != data.points) == 2
    np.testing.assert_array_equal(data.points, 0.0)
