# tests/conftest.py

import numpy as np
import pytest

from config.config import config
from src.models.mixture import Gmm
from src.randomness.streams import RandomStream


@pytest.fixture(autouse=True)
def quiet_progress(monkeypatch):
    monkeypatch.setattr(config.processing, "show_progress", False)


@pytest.fixture
def stream():
    return RandomStream(seed=20240601)


@pytest.fixture
def two_component_gmm():
    return Gmm.from_arrays(
        [0.4, 0.6],
        [[0.0, 0.0], [5.0, 1.0]],
        [[[1.0, 0.2], [0.2, 1.0]], [[2.0, 0.0], [0.0, 0.5]]],
    )


def random_spd(gen: np.random.Generator, d: int) -> np.ndarray:
    a = gen.standard_normal((d, d))
    return a @ a.T / d + 0.5 * np.eye(d)
