import numpy as np
import pytest

from src.models.mixture import Component, Gmm, check_compatible
from src.utils.errors import DegenerateWeights, DimensionMismatch, InvalidGmm


def test_component_build_freezes_arrays():
    c = Component.build(0.5, [1.0, 2.0], np.eye(2))
    assert c.dim == 2
    assert not c.mu.flags.writeable
    assert not c.sigma.flags.writeable


def test_component_build_rejects_bad_inputs():
    with pytest.raises(InvalidGmm):
        Component.build(1.5, [0.0], [[1.0]])
    with pytest.raises(InvalidGmm):
        Component.build(0.5, [0.0, 0.0], [[1.0, 0.0], [0.0, -1.0]])
    with pytest.raises(DimensionMismatch):
        Component.build(0.5, [0.0, 0.0, 0.0], np.eye(2))
    with pytest.raises(InvalidGmm):
        Component.build(0.5, [np.inf], [[1.0]])


def test_from_components_requires_unit_weight_sum():
    parts = [Component.build(0.5, [0.0], [[1.0]]), Component.build(0.4, [1.0], [[1.0]])]
    with pytest.raises(InvalidGmm):
        Gmm.from_components(parts)


def test_normalized_rescales_and_rejects_zero_mass():
    parts = [
        Component.build(2.0, [0.0], [[1.0]], check_weight=False),
        Component.build(6.0, [1.0], [[1.0]], check_weight=False),
    ]
    g = Gmm.normalized(parts)
    np.testing.assert_allclose(g.weights, [0.25, 0.75])
    with pytest.raises(DegenerateWeights):
        Gmm.normalized([c.with_weight(0.0) for c in parts])


def test_mixed_dimensions_rejected():
    with pytest.raises(DimensionMismatch):
        Gmm(components=(Component.build(0.5, [0.0], [[1.0]]), Component.build(0.5, [0.0, 0.0], np.eye(2))))


def test_accessors_and_permutation(two_component_gmm):
    g = two_component_gmm
    assert (g.k, g.d) == (2, 2)
    assert g.means.shape == (2, 2)
    assert g.covariances.shape == (2, 2, 2)
    swapped = g.permuted([1, 0])
    np.testing.assert_array_equal(swapped.weights, [0.6, 0.4])
    assert swapped.permuted([1, 0]).same_as(g)
    with pytest.raises(ValueError):
        g.permuted([0, 0])


def test_check_compatible(two_component_gmm):
    single = Gmm.from_arrays([1.0], [[0.0, 0.0]], [np.eye(2)])
    with pytest.raises(DimensionMismatch):
        check_compatible(two_component_gmm, single)
    check_compatible(two_component_gmm, two_component_gmm)
