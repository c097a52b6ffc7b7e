# src/ppe/pipeline.py

"""
Private mixture fitting: EM on every chunk, the bottleneck mixture distance,
and the calibrated mixture masker wired into the populous estimator.
"""

from dataclasses import dataclass, field
from typing import Dict, Optional, Tuple

import numpy as np

from config.config import config
from src.learning.dataset import Dataset
from src.learning.em import LearnerOptions, em_fit
from src.masking.maskers import GmmMasker, MaskConfig
from src.metrics.distances import pairwise_mixture_distances
from src.models.mixture import Gmm
from src.ppe.calibration import (
    CalibrationInput,
    PpeConfig,
    calibrate_gamma,
    calibrate_mask_config,
    min_subsets,
    ppe_privacy_guarantee,
    ppe_threshold,
    utility_radius_ok,
)
from src.ppe.estimator import PpeOutcome, ppe_run
from src.randomness.streams import RandomStream
from src.utils.errors import ConfigInfeasible, DimensionMismatch, InsufficientData
from src.utils.logging import Logger

logger = Logger.get_logger("PipelineLogger", config.paths.log_dir / "pipeline.log")


@dataclass
class RunRecord:
    """Everything a private fit reports. Only `released` and the parameters are public."""

    released: Optional[Gmm]
    epsilon: float
    delta: float
    t: int
    r: float
    z: float
    gamma: float
    mask: MaskConfig
    guarantee: Tuple[float, float]
    # False when r was forced above the masking radius gamma
    certified: bool
    outcome: PpeOutcome
    timings: Dict[str, float] = field(default_factory=dict)


def masking_input(inp: CalibrationInput) -> CalibrationInput:
    """
    The masking budget: inp.epsilon capped at ppe.mask_epsilon_cap. A mechanism
    masking at a smaller epsilon also masks at the larger one.
    """
    capped = min(inp.epsilon, config.ppe.mask_epsilon_cap)
    return inp.model_copy(update={"epsilon": capped})


def fit_gmm_private(
    dataset: Dataset,
    inp: CalibrationInput,
    learner: LearnerOptions,
    stream: RandomStream,
    t: Optional[int] = None,
    r: Optional[float] = None,
    max_workers: int = 1,
    show_progress: Optional[bool] = None,
) -> RunRecord:
    """
    Fit a k-component mixture under (2 eps, 4 e^eps delta)-differential privacy.

    t defaults to min_subsets(eps, delta) and r to min(gamma, ppe.r_cap). An
    explicit r above gamma still runs but leaves the record uncertified.
    """
    if dataset.d != inp.d:
        raise DimensionMismatch(f"Dataset has d={dataset.d}, calibration expects d={inp.d}")
    if learner.k != inp.k:
        raise ValueError(f"Learner fits k={learner.k}, calibration expects k={inp.k}")

    t = t if t is not None else min_subsets(inp.epsilon, inp.delta)
    threshold = ppe_threshold(t, inp.epsilon, inp.delta)
    if threshold > 1.0:
        raise ConfigInfeasible(
            f"ppe_threshold = {threshold:.6f} > 1 for t={t}, eps={inp.epsilon}, delta={inp.delta}; "
            f"use t >= {min_subsets(inp.epsilon, inp.delta)}"
        )
    per_chunk = config.learner.min_points_factor * inp.k * inp.d
    if dataset.m < t * per_chunk:
        raise InsufficientData(
            f"m = {dataset.m} points cannot give t = {t} chunks of at least {per_chunk}"
        )

    mask_inp = masking_input(inp)
    gamma = calibrate_gamma(mask_inp)
    mask_cfg = calibrate_mask_config(mask_inp)
    radius = r if r is not None else min(gamma, config.ppe.r_cap)
    certified = radius <= gamma
    if not certified:
        logger.warning(
            f"Agreement radius r={radius:.6g} exceeds the masking radius gamma={gamma:.6g}; "
            "the privacy guarantee does not cover this run"
        )

    if not utility_radius_ok(inp.alpha, radius, config.ppe.z):
        logger.warning(
            f"alpha={inp.alpha} exceeds r/(2z)={radius / (2.0 * config.ppe.z):.6g}; "
            "the utility bound does not apply"
        )

    cfg = PpeConfig(epsilon=inp.epsilon, delta=inp.delta, r=radius, z=config.ppe.z, t=t)
    guarantee = ppe_privacy_guarantee(cfg.epsilon, cfg.delta, cfg.t)
    masker = GmmMasker(mask_cfg)

    def learn(chunk: np.ndarray, chunk_stream: RandomStream) -> Gmm:
        return em_fit(Dataset.from_points(chunk), learner, chunk_stream)

    def table(outputs):
        return pairwise_mixture_distances(outputs, max_workers=max_workers)

    logger.info(
        f"Private fit: m={dataset.m}, d={dataset.d}, k={inp.k}, t={t}, r={radius:.6g}, "
        f"gamma={gamma:.6g}"
    )
    outcome = ppe_run(
        dataset,
        learn,
        masker,
        cfg,
        stream,
        pairwise=table,
        max_workers=max_workers,
        show_progress=show_progress,
    )
    return RunRecord(
        released=outcome.released,
        epsilon=cfg.epsilon,
        delta=cfg.delta,
        t=cfg.t,
        r=cfg.r,
        z=cfg.z,
        gamma=gamma,
        mask=mask_cfg,
        guarantee=guarantee,
        certified=certified,
        outcome=outcome,
        timings=dict(outcome.timings),
    )
