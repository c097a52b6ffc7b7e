# src/audit/auditors.py

"""
Monte-Carlo audits of the masking mechanism and the mixture distance.

Every trial draws on its own sub-stream ("trial", i), so reports depend only on
the seed and never on the worker count.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np
from numpy.typing import NDArray
from tqdm import tqdm

from config.config import config
from src.audit.reports import ESTIMATE, LOWER_BOUND, SAMPLED, AuditReport
from src.audit.samplers import Triple
from src.linalg.symmetric import inv_sqrt
from src.masking.maskers import MaskingMechanism
from src.metrics.distances import SemimetricParams, check_restricted_triangle, dist_mixture
from src.models.mixture import Gmm, check_compatible
from src.randomness.streams import RandomStream
from src.utils.errors import DegenerateWeights, PreconditionDistance, SamplerStarved, Singular
from src.utils.logging import Logger

logger = Logger.get_logger("AuditLogger", config.paths.log_dir / "audit.log")

R = TypeVar("R")


def _run_trials(
    trial: Callable[[int], R],
    indices: Sequence[int],
    max_workers: int,
    desc: str,
) -> List[R]:
    show = config.processing.show_progress
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(
                tqdm(pool.map(trial, indices), total=len(indices), desc=desc, disable=not show)
            )
    return [trial(i) for i in tqdm(indices, desc=desc, disable=not show)]


def audit_concentration(
    masker: MaskingMechanism,
    reference: Gmm,
    alpha: float,
    beta: float,
    trials: int,
    stream: RandomStream,
    max_workers: int = 1,
) -> AuditReport:
    """
    Fraction of masked copies farther than alpha from the reference, against
    beta plus a three-sigma binomial margin. Degenerate masks count as misses.
    """
    if trials < config.audit.concentration_min_trials:
        raise ValueError(
            f"Concentration audit needs at least {config.audit.concentration_min_trials} trials"
        )
    if not (alpha > 0 and 0 < beta < 1):
        raise ValueError(f"Need alpha > 0 and beta in (0, 1), got {alpha}, {beta}")

    def trial(i: int) -> float:
        try:
            masked = masker(reference, stream.child("trial", i))
        except (DegenerateWeights, Singular):
            return math.inf
        return dist_mixture(masked, reference)

    distances = np.array(_run_trials(trial, range(trials), max_workers, "Concentration"))
    exceed = int(np.count_nonzero(distances > alpha))
    degenerate = int(np.count_nonzero(np.isinf(distances)))
    finite = distances[np.isfinite(distances)]
    bound = beta + 3.0 * math.sqrt(beta * (1.0 - beta) / trials)
    report = AuditReport.build(
        "concentration",
        trials,
        exceed / trials,
        bound,
        ESTIMATE,
        alpha=alpha,
        beta=beta,
        exceedances=exceed,
        degenerate=degenerate,
        max_distance=float(finite.max()) if finite.size else None,
        median_distance=float(np.median(finite)) if finite.size else None,
    )
    logger.info(f"Concentration audit: {exceed}/{trials} beyond alpha={alpha}, passed={report.passed}")
    return report


def projections(g: Gmm, white: NDArray[np.float64]) -> NDArray[np.float64]:
    """
    Scalar statistics of a mixture: the k weights, the k*d mean coordinates
    after whitening, and the k Frobenius deviations ||W S W - I||_F, slot by slot.
    """
    identity = np.eye(g.d)
    means = (g.means @ white.T).ravel()
    deviations = [np.linalg.norm(white @ c.sigma @ white - identity) for c in g.components]
    return np.concatenate([g.weights, means, deviations])


def projection_names(k: int, d: int) -> List[str]:
    names = [f"w[{i}]" for i in range(k)]
    names += [f"mu[{i}][{j}]" for i in range(k) for j in range(d)]
    names += [f"cov_dev[{i}]" for i in range(k)]
    return names


def merged_histograms(
    left: NDArray[np.float64],
    right: NDArray[np.float64],
    bins: int,
    min_count: float,
) -> Tuple[NDArray[np.float64], NDArray[np.float64]]:
    """
    Equal-width counts of two samples over their pooled range, with adjacent
    bins merged left to right until each holds min_count expected draws
    (the mean of the two counts). A short final run joins its neighbor.
    """
    low = min(left.min(), right.min())
    high = max(left.max(), right.max())
    if not high > low:
        return np.array([left.size], dtype=float), np.array([right.size], dtype=float)
    edges = np.linspace(low, high, bins + 1)
    counts_l, _ = np.histogram(left, bins=edges)
    counts_r, _ = np.histogram(right, bins=edges)

    merged_l: List[float] = []
    merged_r: List[float] = []
    acc_l = acc_r = 0.0
    for cl, cr in zip(counts_l, counts_r):
        acc_l += cl
        acc_r += cr
        if (acc_l + acc_r) / 2.0 >= min_count:
            merged_l.append(acc_l)
            merged_r.append(acc_r)
            acc_l = acc_r = 0.0
    if acc_l or acc_r:
        if merged_l:
            merged_l[-1] += acc_l
            merged_r[-1] += acc_r
        else:
            merged_l.append(acc_l)
            merged_r.append(acc_r)
    return np.array(merged_l), np.array(merged_r)


def log_ratio_epsilon(
    left: NDArray[np.float64],
    right: NDArray[np.float64],
    delta: float,
    bins: Optional[int] = None,
    min_count: Optional[float] = None,
) -> float:
    """max over merged bins of |ln((p + delta) / (q + delta))|."""
    bins = bins if bins is not None else config.audit.histogram_bins
    min_count = min_count if min_count is not None else config.audit.min_expected_count
    counts_l, counts_r = merged_histograms(left, right, bins, min_count)
    p = counts_l / left.size
    q = counts_r / right.size
    return float(np.max(np.abs(np.log((p + delta) / (q + delta)))))


def audit_indistinguishability(
    masker: MaskingMechanism,
    f: Gmm,
    f_prime: Gmm,
    epsilon_target: float,
    delta_target: float,
    trials: int,
    stream: RandomStream,
    gamma: Optional[float] = None,
    max_workers: int = 1,
) -> AuditReport:
    """
    Histogram lower bound on the privacy loss between masked f and masked
    f_prime along every scalar projection.

    Both inputs are masked on the same trial sub-stream (common random numbers),
    so identical inputs give identical histograms. Projections whiten with the
    weighted mean covariance of f. A statistic above epsilon_target is a
    detected violation; one below it is only consistent with the target.
    """
    if trials < config.audit.indistinguishability_min_trials:
        raise ValueError(
            f"Indistinguishability audit needs at least "
            f"{config.audit.indistinguishability_min_trials} trials"
        )
    check_compatible(f, f_prime)
    gap = dist_mixture(f, f_prime)
    if gamma is not None and gap > gamma:
        raise PreconditionDistance(f"dist(f, f') = {gap:.6g} exceeds gamma = {gamma:.6g}")

    white = inv_sqrt(np.einsum("i,ijk->jk", f.weights, f.covariances))

    def trial(i: int) -> Tuple[Optional[NDArray], Optional[NDArray]]:
        trial_stream = stream.child("trial", i)
        out = []
        for g in (f, f_prime):
            try:
                out.append(projections(masker(g, trial_stream), white))
            except (DegenerateWeights, Singular):
                out.append(None)
        return out[0], out[1]

    results = _run_trials(trial, range(trials), max_workers, "Indistinguishability")
    left = np.array([a for a, _ in results if a is not None])
    right = np.array([b for _, b in results if b is not None])
    degenerate = (trials - len(left), trials - len(right))

    names = projection_names(f.k, f.d)
    per_projection = {}
    if len(left) and len(right):
        for j, name in enumerate(names):
            per_projection[name] = log_ratio_epsilon(left[:, j], right[:, j], delta_target)
        statistic = max(per_projection.values())
    else:
        statistic = math.inf

    worst = max(per_projection, key=per_projection.get) if per_projection else None
    report = AuditReport.build(
        "indistinguishability",
        trials,
        statistic,
        epsilon_target,
        LOWER_BOUND,
        delta_target=delta_target,
        input_distance=gap,
        gamma=gamma,
        ceiling=math.log((1.0 + delta_target) / delta_target),
        worst_projection=worst,
        per_projection=per_projection,
        degenerate=degenerate,
    )
    logger.info(
        f"Indistinguishability audit: eps_hat={statistic:.4f} vs target {epsilon_target:.4f} "
        f"({worst}), passed={report.passed}"
    )
    return report


def audit_triangle(
    sampler: Callable[[RandomStream], Triple],
    params: SemimetricParams,
    trials: int,
    stream: RandomStream,
    max_workers: int = 1,
) -> AuditReport:
    """
    Sample triples until `trials` of them have both legs within r, then check
    d13 <= z (d12 + d23) on each. The statistic is the largest d13 / (d12 + d23);
    triples at zero distance throughout are skipped. Proposals that degenerate
    under perturbation are rejected like out-of-range ones.
    """
    if trials < 1:
        raise ValueError(f"Need at least one trial, got {trials}")
    max_attempts = math.ceil(trials / (1.0 - config.audit.starvation_rate))

    def attempt(i: int) -> Optional[Tuple[float, float, float]]:
        try:
            f1, f2, f3 = sampler(stream.child("trial", i))
            return dist_mixture(f1, f2), dist_mixture(f2, f3), dist_mixture(f1, f3)
        except (DegenerateWeights, Singular):
            return None

    accepted: List[Tuple[float, float, float]] = []
    attempts = degenerate = 0
    while len(accepted) < trials:
        if attempts >= max_attempts:
            raise SamplerStarved(
                f"Only {len(accepted)} of {attempts} proposals were within r = {params.r}"
            )
        batch = range(attempts, min(max_attempts, attempts + trials - len(accepted)))
        for legs in _run_trials(attempt, batch, max_workers, "Triangle"):
            attempts += 1
            if legs is None:
                degenerate += 1
                continue
            d12, d23, d13 = legs
            if d12 <= params.r and d23 <= params.r:
                accepted.append((d12, d23, d13))
                if len(accepted) == trials:
                    break

    ratios = []
    skipped = violations = 0
    for d12, d23, d13 in accepted:
        if not check_restricted_triangle(d12, d23, d13, params):
            violations += 1
        if d12 + d23 == 0.0:
            if d13 == 0.0:
                skipped += 1
            else:
                ratios.append(math.inf)
            continue
        ratios.append(d13 / (d12 + d23))

    statistic = max(ratios) if ratios else 0.0
    report = AuditReport.build(
        "triangle",
        trials,
        statistic,
        params.z,
        SAMPLED,
        passed=violations == 0,
        r=params.r,
        violations=violations,
        skipped=skipped,
        attempts=attempts,
        degenerate=degenerate,
        max_leg=max((max(d12, d23) for d12, d23, _ in accepted), default=0.0),
    )
    logger.info(
        f"Triangle audit: max ratio {statistic:.4f} over {trials} triples, "
        f"{violations} violations, {skipped} skipped"
    )
    return report
