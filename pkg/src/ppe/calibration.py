# src/ppe/calibration.py

"""
Closed-form privacy and utility bookkeeping for the populous estimator and the
mixture masker: failure threshold, subset count, composition, and noise
calibration.
"""

import math
from typing import Tuple

from pydantic import BaseModel, ConfigDict, Field

from config.config import config
from src.masking.maskers import MaskConfig
from src.randomness.noise import TLapParams, tlap_bound
from src.utils.errors import ConfigInfeasible, EpsilonTooLarge, Infeasible
from src.utils.logging import Logger

logger = Logger.get_logger("CalibrationLogger", config.paths.log_dir / "calibration.log")

# masking calibration holds for epsilon < ln(2)/3
MAX_MASK_EPSILON = math.log(2.0) / 3.0


class PpeConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    epsilon: float = Field(gt=0)
    delta: float = Field(gt=0, lt=1)
    r: float = Field(gt=0)
    z: float = Field(ge=1)
    t: int = Field(ge=6)


class CalibrationInput(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(gt=0, lt=1)
    beta: float = Field(gt=0, lt=1)
    epsilon: float = Field(gt=0)
    delta: float = Field(gt=0, lt=1)
    k: int = Field(ge=1)
    d: int = Field(ge=1)
    c2: float = Field(default_factory=lambda: config.ppe.c2, gt=0)


def ppe_threshold(t: int, epsilon: float, delta: float) -> float:
    """0.8 + (2/(t eps)) ln(1 + (e^eps - 1)/(2 delta)): the noisy-average pass mark."""
    if t < 1:
        raise ValueError(f"t must be positive, got {t}")
    return config.ppe.pass_fraction + tlap_bound(
        TLapParams(delta_sens=2.0 / t, epsilon=epsilon, delta=delta)
    )


def min_subsets(epsilon: float, delta: float) -> int:
    """Smallest t >= (20/eps) ln(1 + (e^eps - 1)/(2 delta)), and never below 6."""
    bound = tlap_bound(TLapParams(delta_sens=20.0, epsilon=epsilon, delta=delta))
    return max(6, math.ceil(bound))


def compose_epsilon(k: int, epsilon: float, delta_prime: float) -> float:
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    if not 0 < delta_prime < 1:
        raise ValueError(f"delta' must lie in (0, 1), got {delta_prime}")
    return math.sqrt(2.0 * k * math.log(1.0 / delta_prime)) * epsilon + k * epsilon * math.expm1(
        epsilon
    )


def compose_masking(
    k: int, epsilon: float, delta: float, delta_prime: float
) -> Tuple[float, float]:
    """(eps', k delta + delta') for the shuffled k-fold lift of a component masker."""
    return compose_epsilon(k, epsilon, delta_prime), k * delta + delta_prime


def compose_concentration(k: int, beta: float) -> float:
    return k * beta


def ppe_privacy_guarantee(epsilon: float, delta: float, t: int) -> Tuple[float, float]:
    """The estimator is (2 eps, 4 e^eps delta)-DP once t > 5."""
    if t <= 5:
        raise ConfigInfeasible(f"Privacy of the estimator needs t > 5, got t = {t}")
    return 2.0 * epsilon, 4.0 * math.exp(epsilon) * delta


def component_concentration_radius(alpha: float, z: float) -> float:
    return alpha / (2.0 * z)


def utility_radius_ok(alpha: float, r: float, z: float) -> bool:
    return alpha <= r / (2.0 * z)


def calibrate_gamma(inp: CalibrationInput) -> float:
    """
    Largest masking radius
    gamma = eps alpha / (C2 sqrt(k ln(2/delta)) sqrt(d^2 (d + ln(12k/beta))) ln(12k/delta)).
    """
    if inp.epsilon >= MAX_MASK_EPSILON:
        raise EpsilonTooLarge(
            f"epsilon = {inp.epsilon} must be below ln(2)/3 = {MAX_MASK_EPSILON:.6f}"
        )
    k, d = inp.k, inp.d
    denominator = (
        inp.c2
        * math.sqrt(k * math.log(2.0 / inp.delta))
        * math.sqrt(d * d * (d + math.log(12.0 * k / inp.beta)))
        * math.log(12.0 * k / inp.delta)
    )
    return inp.epsilon * inp.alpha / denominator


def noise_floor(inp: CalibrationInput, gamma: float) -> float:
    """
    Smallest noise scale hiding a gamma-sized shift: Gaussian-mechanism scaling
    at the per-component budget eps / sqrt(2k ln(2/delta)).
    """
    eps_comp = inp.epsilon / math.sqrt(2.0 * inp.k * math.log(2.0 / inp.delta))
    return gamma * math.sqrt(2.0 * math.log(1.25 * inp.k / inp.delta)) / eps_comp


def noise_caps(inp: CalibrationInput) -> Tuple[float, float, float]:
    """
    Largest (eta_w, eta_mean, eta_cov) keeping every distance term within alpha/3
    except with probability beta/(3k) per term.
    """
    share = inp.alpha / 3.0
    tail = math.sqrt(2.0 * math.log(6.0 * inp.k / inp.beta))
    root_d = math.sqrt(inp.d)
    frob_bound = root_d * (root_d + tail)
    # 2 eta B + eta^2 B^2 <= share  <=>  eta <= (sqrt(1 + share) - 1) / B
    return (
        share / tail,
        share / (root_d + tail),
        (math.sqrt(1.0 + share) - 1.0) / frob_bound,
    )


def calibrate_mask_config(inp: CalibrationInput) -> MaskConfig:
    """
    Noise scales for the mixture masker: the privacy floor for radius
    calibrate_gamma(inp), provided it fits under every concentration cap.
    """
    gamma = calibrate_gamma(inp)
    floor = noise_floor(inp, gamma)
    caps = noise_caps(inp)
    names = ("eta_w", "eta_mean", "eta_cov")
    violated = [f"{n} cap {cap:.6g}" for n, cap in zip(names, caps) if floor > cap]
    if violated:
        raise Infeasible(
            f"Privacy floor {floor:.6g} exceeds {', '.join(violated)}; "
            f"increase c2 or alpha (gamma = {gamma:.6g})"
        )
    cfg = MaskConfig(eta_w=floor, eta_mean=floor, eta_cov=floor)
    logger.debug(f"Calibrated {cfg} for gamma={gamma:.6g}, caps={caps}")
    return cfg
