# src/ppe/estimator.py

"""
The private populous estimator.

The dataset is cut into t equal chunks, a non-private learner runs on each,
and every chunk output is scored by the fraction of chunk outputs lying within
r/(2z) of it. A truncated-Laplace noisy average of the scores is compared with
ppe_threshold; on success the first output scoring above 0.6 is passed through
the masking mechanism, otherwise the estimator fails.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Generic, List, Optional, Sequence, Tuple, TypeVar, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from tqdm import tqdm

from config.config import config
from src.learning.dataset import Dataset
from src.ppe.calibration import PpeConfig, ppe_threshold
from src.randomness.noise import TLapParams, tlap_sample
from src.randomness.streams import RandomStream
from src.utils.errors import (
    ConfigInfeasible,
    DegenerateWeights,
    InsufficientData,
    PrivGmmError,
    Singular,
)
from src.utils.logging import Logger

logger = Logger.get_logger("PpeLogger", config.paths.log_dir / "ppe.log")

Y = TypeVar("Y")

Learner = Callable[[NDArray[np.float64], RandomStream], Y]
Masker = Callable[[Y, RandomStream], Y]
PairwiseDistances = Callable[[Sequence[Optional[Y]]], NDArray[np.float64]]

# reasons for a failed run
FAILED_TEST = "below_threshold"
FAILED_MASK = "mask_degenerate"


@dataclass
class PpeOutcome(Generic[Y]):
    """
    Result of one estimator run. `released` is None when the run failed; the
    remaining fields are diagnostics and must not be published.
    """

    released: Optional[Y]
    threshold: float
    q_mean: float
    q_noised: float
    scores: NDArray[np.float64]
    selected_index: Optional[int] = None
    failure: Optional[str] = None
    failed_chunks: Tuple[int, ...] = ()
    timings: Dict[str, float] = field(default_factory=dict)

    @property
    def is_released(self) -> bool:
        return self.released is not None


def pairwise_from_dist(dist: Callable[[Y, Y], float]) -> PairwiseDistances:
    """Symmetric distance table from a two-argument distance; None entries are at infinity."""

    def table(outputs: Sequence[Optional[Y]]) -> NDArray[np.float64]:
        count = len(outputs)
        result = np.zeros((count, count))
        for i in range(count):
            for j in range(i + 1, count):
                if outputs[i] is None or outputs[j] is None:
                    value = np.inf
                else:
                    value = float(dist(outputs[i], outputs[j]))
                result[i, j] = result[j, i] = value
        return result

    return table


def populous_scores(table: ArrayLike, radius: float) -> NDArray[np.float64]:
    """q_i = |{j : D[i, j] <= radius}| / t, each output counting itself."""
    table = np.array(table, dtype=np.float64)
    np.fill_diagonal(table, 0.0)
    return np.count_nonzero(table <= radius, axis=1) / table.shape[0]


def _chunks(data: Union[Dataset, Sequence, NDArray], t: int) -> List:
    if isinstance(data, Dataset):
        data = data.points
    m = len(data)
    if m < t:
        raise InsufficientData(f"Need at least t = {t} points, got {m}")
    size = m // t
    return [data[i * size : (i + 1) * size] for i in range(t)]


def _learn_all(
    chunks: List,
    learner: Learner,
    stream: RandomStream,
    max_workers: int,
    show_progress: bool,
) -> List[Optional[Y]]:
    def learn(i: int) -> Optional[Y]:
        try:
            return learner(chunks[i], stream.child("chunk", i))
        except (PrivGmmError, np.linalg.LinAlgError) as e:
            logger.warning(f"Learner failed on chunk {i}: {e}")
            return None

    with tqdm(total=len(chunks), desc="Learning chunks", disable=not show_progress) as pbar:
        if max_workers > 1:
            with ThreadPoolExecutor(max_workers=max_workers) as pool:
                outputs = []
                for output in pool.map(learn, range(len(chunks))):
                    outputs.append(output)
                    pbar.update(1)
                return outputs
        outputs = []
        for i in range(len(chunks)):
            outputs.append(learn(i))
            pbar.update(1)
        return outputs


def ppe_run(
    data: Union[Dataset, Sequence, NDArray],
    learner: Learner,
    masker: Masker,
    cfg: PpeConfig,
    stream: RandomStream,
    dist: Optional[Callable[[Y, Y], float]] = None,
    pairwise: Optional[PairwiseDistances] = None,
    max_workers: int = 1,
    show_progress: Optional[bool] = None,
) -> PpeOutcome[Y]:
    """
    Run the estimator once. Exactly one of `dist` or `pairwise` supplies the
    semimetric. Chunk i learns on sub-stream ("chunk", i); the score noise and
    the mask use ("tlap",) and ("mask",). A chunk whose learner raises is kept
    as a missing output at infinite distance from every other one.
    """
    if (dist is None) == (pairwise is None):
        raise ValueError("Pass exactly one of dist or pairwise")
    table_fn = pairwise if pairwise is not None else pairwise_from_dist(dist)
    progress = config.processing.show_progress if show_progress is None else show_progress

    threshold = ppe_threshold(cfg.t, cfg.epsilon, cfg.delta)
    if threshold > 1.0:
        raise ConfigInfeasible(
            f"ppe_threshold = {threshold:.6f} > 1 for t={cfg.t}, eps={cfg.epsilon}, delta={cfg.delta}"
        )
    chunks = _chunks(data, cfg.t)
    timings: Dict[str, float] = {}

    started = time.perf_counter()
    outputs = _learn_all(chunks, learner, stream, max_workers, progress)
    timings["learn"] = time.perf_counter() - started
    failed = tuple(i for i, y in enumerate(outputs) if y is None)

    started = time.perf_counter()
    table = table_fn(outputs)
    timings["distances"] = time.perf_counter() - started

    scores = populous_scores(table, cfg.r / (2.0 * cfg.z))
    q_mean = float(scores.mean())
    noise_params = TLapParams(delta_sens=2.0 / cfg.t, epsilon=cfg.epsilon, delta=cfg.delta)
    q_noised = q_mean + float(tlap_sample(stream.child("tlap"), noise_params))
    logger.debug(
        f"PPE t={cfg.t}: Q={q_mean:.4f}, noisy Q={q_noised:.4f}, threshold={threshold:.4f}"
    )
    logger.info(
        f"PPE t={cfg.t}: learned in {timings['learn']:.2f}s, distances in "
        f"{timings['distances']:.2f}s, {len(failed)} failed chunks"
    )

    outcome = PpeOutcome(
        released=None,
        threshold=threshold,
        q_mean=q_mean,
        q_noised=q_noised,
        scores=scores,
        failed_chunks=failed,
        timings=timings,
    )
    if q_noised < threshold:
        outcome.failure = FAILED_TEST
        logger.info("PPE returned bot: agreement test failed")
        return outcome

    above = np.flatnonzero(scores > config.ppe.selection_fraction)
    # a pass certifies Q >= pass_fraction, so some score exceeds selection_fraction
    assert above.size > 0, (
        f"Noisy average {q_noised:.4f} passed with no score above the selection fraction"
    )
    selected = int(above[0])
    outcome.selected_index = selected

    started = time.perf_counter()
    try:
        outcome.released = masker(outputs[selected], stream.child("mask"))
    except (DegenerateWeights, Singular) as e:
        logger.info(f"PPE returned bot: masking failed ({e})")
        outcome.failure = FAILED_MASK
    timings["mask"] = time.perf_counter() - started
    return outcome
