import math

import pytest
from pydantic import ValidationError

from src.masking.maskers import MaskConfig
from src.ppe.calibration import (
    MAX_MASK_EPSILON,
    CalibrationInput,
    PpeConfig,
    calibrate_gamma,
    calibrate_mask_config,
    component_concentration_radius,
    compose_concentration,
    compose_epsilon,
    compose_masking,
    min_subsets,
    noise_caps,
    noise_floor,
    ppe_privacy_guarantee,
    ppe_threshold,
    utility_radius_ok,
)
from src.utils.errors import ConfigInfeasible, EpsilonTooLarge, Infeasible


def _input(**overrides):
    values = dict(alpha=0.2, beta=0.1, epsilon=0.1, delta=1e-6, k=2, d=2, c2=10.0)
    values.update(overrides)
    return CalibrationInput(**values)


def test_ppe_threshold_values():
    assert ppe_threshold(274, 1.0, 1e-6) == pytest.approx(0.899735, abs=1e-6)
    assert ppe_threshold(100, 1.0, 1e-6) == pytest.approx(1.073274, abs=1e-6)
    with pytest.raises(ValueError):
        ppe_threshold(0, 1.0, 1e-6)


@pytest.mark.parametrize(
    "epsilon,delta,expected", [(1.0, 1e-6, 274), (0.5, 1e-5, 416), (10.0, 0.4, 21)]
)
def test_min_subsets(epsilon, delta, expected):
    t = min_subsets(epsilon, delta)
    assert t == expected
    assert ppe_threshold(t, epsilon, delta) <= 0.9 + 1e-12


def test_composition():
    assert compose_epsilon(4, 0.1, 1e-6) == pytest.approx(1.0933727, abs=1e-6)
    assert compose_epsilon(1, 0.1, 1e-6) == pytest.approx(0.536169, abs=1e-6)
    eps, delta = compose_masking(3, 0.1, 1e-7, 1e-6)
    assert eps == compose_epsilon(3, 0.1, 1e-6)
    assert delta == pytest.approx(1.3e-6)
    assert compose_concentration(4, 0.01) == pytest.approx(0.04)
    with pytest.raises(ValueError):
        compose_epsilon(0, 0.1, 1e-6)
    with pytest.raises(ValueError):
        compose_epsilon(2, 0.1, 1.0)


def test_privacy_guarantee():
    eps, delta = ppe_privacy_guarantee(1.0, 1e-6, 274)
    assert eps == 2.0
    assert delta == pytest.approx(4.0 * math.e * 1e-6)
    with pytest.raises(ConfigInfeasible):
        ppe_privacy_guarantee(1.0, 1e-6, 5)


def test_utility_radius():
    assert component_concentration_radius(0.3, 1.5) == pytest.approx(0.1)
    assert utility_radius_ok(0.3, 1.0, 1.5)
    assert not utility_radius_ok(0.4, 1.0, 1.5)


def test_calibrate_gamma_worked_example():
    inp = _input(alpha=0.05, beta=0.05, k=2, d=3, c2=1.0)
    assert calibrate_gamma(inp) == pytest.approx(6.0112e-6, rel=1e-4)


def test_calibrate_gamma_rejects_large_epsilon():
    assert MAX_MASK_EPSILON == pytest.approx(math.log(2.0) / 3.0)
    with pytest.raises(EpsilonTooLarge):
        calibrate_gamma(_input(epsilon=0.25))


def test_calibrated_mask_config():
    inp = _input()
    gamma = calibrate_gamma(inp)
    assert gamma == pytest.approx(3.994e-6, rel=1e-3)
    cfg = calibrate_mask_config(inp)
    assert isinstance(cfg, MaskConfig)
    assert cfg.eta_w == cfg.eta_mean == cfg.eta_cov == noise_floor(inp, gamma)
    assert cfg.eta_w == pytest.approx(1.6516e-3, rel=1e-3)
    assert all(cfg.eta_w <= cap for cap in noise_caps(inp))


def test_noise_scales_linearly_in_alpha():
    low = calibrate_mask_config(_input(alpha=0.2))
    high = calibrate_mask_config(_input(alpha=0.4))
    assert high.eta_mean == pytest.approx(2.0 * low.eta_mean, rel=1e-12)


def test_infeasible_calibration():
    with pytest.raises(Infeasible):
        calibrate_mask_config(_input(c2=1.0))
    one_dim = dict(alpha=0.3, beta=0.1, epsilon=0.2, delta=1e-6, k=1, d=1)
    calibrate_mask_config(CalibrationInput(c2=10.0, **one_dim))
    with pytest.raises(Infeasible):
        calibrate_mask_config(CalibrationInput(c2=1.0, **one_dim))


def test_config_models_validate():
    with pytest.raises(ValidationError):
        PpeConfig(epsilon=1.0, delta=1e-6, r=1.0, z=1.5, t=5)
    with pytest.raises(ValidationError):
        PpeConfig(epsilon=1.0, delta=1e-6, r=1.0, z=0.5, t=10)
    with pytest.raises(ValidationError):
        _input(alpha=1.0)
    assert CalibrationInput(alpha=0.1, beta=0.1, epsilon=0.1, delta=1e-6, k=1, d=1).c2 == 10.0
