# src/learning/dataset.py

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.utils.errors import DimensionMismatch


@dataclass(frozen=True, eq=False)
class Dataset:
    """Ordered points in R^d. Order matters: chunking is positional."""

    points: NDArray[np.float64]

    @classmethod
    def from_points(cls, points: ArrayLike) -> "Dataset":
        points = np.array(points, dtype=np.float64)
        if points.ndim == 1 and points.size == 0:
            raise DimensionMismatch("Cannot infer the dimension of an empty point list")
        if points.ndim != 2 or points.shape[1] < 1:
            raise DimensionMismatch(f"Points must form an (m, d) array, got {points.shape}")
        if not np.all(np.isfinite(points)):
            raise ValueError("Dataset contains non-finite entries")
        points.setflags(write=False)
        return cls(points=points)

    @property
    def m(self) -> int:
        return int(self.points.shape[0])

    @property
    def d(self) -> int:
        return int(self.points.shape[1])

    def __len__(self) -> int:
        return self.m

    def chunk(self, index: int, size: int) -> NDArray[np.float64]:
        """Points index*size ... (index+1)*size - 1 (zero-based chunk index)."""
        return self.points[index * size : (index + 1) * size]

    def with_point(self, position: int, point: ArrayLike) -> "Dataset":
        """A neighboring dataset with one point replaced."""
        points = self.points.copy()
        points[position] = np.asarray(point, dtype=np.float64)
        return Dataset.from_points(points)
