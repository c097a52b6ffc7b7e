# src/learning/em.py

"""
Expectation-maximization for full-covariance Gaussian mixtures. This is the
non-private learner run on every chunk by the populous estimator.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field
from scipy import linalg
from scipy.special import logsumexp

from config.config import config
from src.learning.dataset import Dataset
from src.models.mixture import Component, Gmm
from src.randomness.streams import RandomStream
from src.utils.errors import InsufficientData, LearnFailed
from src.utils.logging import Logger

logger = Logger.get_logger("EmLogger", config.paths.log_dir / "em.log")

_LOG_2PI = math.log(2.0 * math.pi)


class LearnerOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    k: int = Field(ge=1)
    max_iters: int = Field(default_factory=lambda: config.learner.max_iters, ge=1)
    restarts: int = Field(default_factory=lambda: config.learner.restarts, ge=1)
    tol: float = Field(default_factory=lambda: config.learner.tol, gt=0)
    # None: reg_scale times the average per-coordinate variance of the data
    reg: Optional[float] = Field(default=None, gt=0)
    max_workers: int = Field(default=1, ge=1)
    check_monotone: bool = False


@dataclass
class EmResult:
    gmm: Gmm
    log_likelihood: float
    iterations: int
    converged: bool
    restart: int
    trace: List[float] = field(default_factory=list)


def _kmeans_plus_plus(
    points: NDArray[np.float64], k: int, gen: np.random.Generator
) -> NDArray[np.float64]:
    m = points.shape[0]
    centers = [points[gen.integers(m)]]
    closest = np.sum((points - centers[0]) ** 2, axis=1)
    for _ in range(1, k):
        total = closest.sum()
        if total <= 0.0:
            idx = int(gen.integers(m))
        else:
            idx = int(gen.choice(m, p=closest / total))
        centers.append(points[idx])
        closest = np.minimum(closest, np.sum((points - points[idx]) ** 2, axis=1))
    return np.array(centers)


def _weighted_log_prob(
    points: NDArray[np.float64],
    weights: NDArray[np.float64],
    means: NDArray[np.float64],
    covs: NDArray[np.float64],
) -> NDArray[np.float64]:
    m, d = points.shape
    out = np.empty((m, len(weights)))
    for j, (w, mu, cov) in enumerate(zip(weights, means, covs)):
        try:
            lower = linalg.cholesky(cov, lower=True, check_finite=False)
        except linalg.LinAlgError as e:
            raise LearnFailed(f"Component {j} covariance lost definiteness: {e}") from e
        solved = linalg.solve_triangular(
            lower, (points - mu).T, lower=True, check_finite=False
        )
        log_det = 2.0 * np.sum(np.log(np.diag(lower)))
        with np.errstate(divide="ignore"):
            log_w = np.log(w)
        out[:, j] = log_w - 0.5 * (d * _LOG_2PI + log_det + np.sum(solved**2, axis=0))
    return out


def _m_step(
    points: NDArray[np.float64], resp: NDArray[np.float64], reg: float
) -> Tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
    d = points.shape[1]
    nk = resp.sum(axis=0) + 10 * np.finfo(np.float64).eps
    weights = nk / nk.sum()
    means = (resp.T @ points) / nk[:, None]
    covs = np.empty((len(nk), d, d))
    for j in range(len(nk)):
        diff = points - means[j]
        covs[j] = (resp[:, j] * diff.T) @ diff / nk[j]
        covs[j] = 0.5 * (covs[j] + covs[j].T) + reg * np.eye(d)
    return weights, means, covs


def _run_restart(
    points: NDArray[np.float64],
    opts: LearnerOptions,
    reg: float,
    restart: int,
    stream: RandomStream,
) -> EmResult:
    m, d = points.shape
    gen = stream.child("restart", restart).generator()

    weights = np.full(opts.k, 1.0 / opts.k)
    means = _kmeans_plus_plus(points, opts.k, gen)
    global_cov = np.atleast_2d(np.cov(points.T, bias=True)) + reg * np.eye(d)
    covs = np.repeat(global_cov[None], opts.k, axis=0)

    trace: List[float] = []
    converged = False
    iteration = 0
    for iteration in range(1, opts.max_iters + 1):
        log_prob = _weighted_log_prob(points, weights, means, covs)
        log_norm = logsumexp(log_prob, axis=1)
        ll = float(log_norm.sum())
        if not math.isfinite(ll):
            raise LearnFailed(f"Non-finite log-likelihood in restart {restart}")
        if trace:
            previous = trace[-1]
            slack = 1e-9 * max(1.0, abs(previous))
            if ll < previous - slack:
                logger.debug(
                    f"Restart {restart}: log-likelihood fell {previous - ll:.3e} at iteration {iteration}"
                )
                if opts.check_monotone:
                    raise AssertionError("EM log-likelihood decreased")
        trace.append(ll)
        if len(trace) > 1 and (trace[-1] - trace[-2]) <= opts.tol * max(1.0, abs(trace[-2])):
            converged = True
            break
        resp = np.exp(log_prob - log_norm[:, None])
        weights, means, covs = _m_step(points, resp, reg)

    gmm = Gmm.normalized(
        Component.build(w, mu, cov, check_weight=False)
        for w, mu, cov in zip(weights, means, covs)
    )
    return EmResult(
        gmm=gmm,
        log_likelihood=trace[-1],
        iterations=iteration,
        converged=converged,
        restart=restart,
        trace=trace,
    )


def default_reg(points: NDArray[np.float64]) -> float:
    variance = float(np.mean(np.var(points, axis=0)))
    return config.learner.reg_scale * (variance if variance > 0 else 1.0)


def em_fit_detailed(
    data: Dataset, opts: LearnerOptions, stream: RandomStream
) -> EmResult:
    points = data.points
    m, d = points.shape
    floor = config.learner.min_points_factor * opts.k * d
    if m < floor:
        raise InsufficientData(
            f"EM with k={opts.k}, d={d} needs at least {floor} points, got {m}"
        )
    reg = opts.reg if opts.reg is not None else default_reg(points)

    def attempt(restart: int) -> EmResult:
        return _run_restart(points, opts, reg, restart, stream)

    if opts.max_workers > 1 and opts.restarts > 1:
        with ThreadPoolExecutor(max_workers=opts.max_workers) as pool:
            results = list(pool.map(attempt, range(opts.restarts)))
    else:
        results = [attempt(r) for r in range(opts.restarts)]

    # highest likelihood wins; ties go to the lowest restart index
    best = max(results, key=lambda r: (r.log_likelihood, -r.restart))
    logger.debug(
        f"EM best restart {best.restart}: ll={best.log_likelihood:.6f}, "
        f"iterations={best.iterations}, converged={best.converged}"
    )
    return best


def em_fit(data: Dataset, opts: LearnerOptions, stream: RandomStream) -> Gmm:
    return em_fit_detailed(data, opts, stream).gmm
