import numpy as np
import pytest
from pydantic import ValidationError

from src.learning.dataset import Dataset
from src.learning.em import LearnerOptions, em_fit, em_fit_detailed
from src.learning.synthesis import make_separated_gmm, sample_gmm
from src.metrics.distances import dist_mixture
from src.utils.errors import InsufficientData


@pytest.fixture
def separated(stream):
    truth = make_separated_gmm(2, 2, 10.0, stream.child("truth"))
    return truth, sample_gmm(truth, 4000, stream.child("data"))


def test_em_recovers_separated_mixture(separated, stream):
    truth, data = separated
    result = em_fit_detailed(data, LearnerOptions(k=2), stream)
    assert result.converged
    assert dist_mixture(result.gmm, truth) < 0.3
    assert result.log_likelihood == result.trace[-1]


def test_em_is_reproducible(separated, stream):
    _, data = separated
    opts = LearnerOptions(k=2, restarts=3)
    first = em_fit(data, opts, stream)
    assert first.same_as(em_fit(data, opts, stream))
    assert first.same_as(em_fit(data, opts.model_copy(update={"max_workers": 3}), stream))


def test_em_single_component_matches_sample_moments(stream):
    gen = np.random.default_rng(2)
    data = Dataset.from_points(gen.standard_normal((500, 3)) * [1.0, 2.0, 0.5])
    g = em_fit(data, LearnerOptions(k=1, reg=1e-9), stream)
    np.testing.assert_allclose(g.means[0], data.points.mean(axis=0), atol=1e-9)
    np.testing.assert_allclose(
        g.covariances[0], np.cov(data.points.T, bias=True), atol=1e-6
    )


def test_em_needs_enough_points(stream):
    data = Dataset.from_points(np.zeros((30, 2)))
    with pytest.raises(InsufficientData):
        em_fit(data, LearnerOptions(k=2), stream)


def test_learner_options_validation():
    with pytest.raises(ValidationError):
        LearnerOptions(k=0)
    assert LearnerOptions(k=2).restarts >= 1
