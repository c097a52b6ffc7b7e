# src/randomness/streams.py

from dataclasses import dataclass, field
from typing import Tuple, Union

import numpy as np
import xxhash

StreamKey = Union[int, str]


def _key_to_int(key: StreamKey) -> int:
    if isinstance(key, str):
        return xxhash.xxh64_intdigest(key.encode("utf-8"))
    if key < 0:
        raise ValueError(f"Stream keys must be nonnegative, got {key}")
    return int(key)


@dataclass(frozen=True)
class RandomStream:
    """
    Immutable handle on a reproducible random stream.

    A stream is named by a master ``seed`` and a key path starting at
    ``stream_id``. Every sampler builds a fresh generator from the handle, so
    drawing twice from the same handle gives the same numbers; independent
    randomness comes from ``child``. Keys are mixed into a Philox counter-based
    generator through ``numpy.random.SeedSequence`` rather than by reseeding.
    """

    seed: int
    stream_id: int = 0
    path: Tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.seed < 0:
            raise ValueError(f"Seed must be nonnegative, got {self.seed}")
        if self.stream_id < 0:
            raise ValueError(f"stream_id must be nonnegative, got {self.stream_id}")

    @property
    def spawn_key(self) -> Tuple[int, ...]:
        return (self.stream_id,) + self.path

    def child(self, *keys: StreamKey) -> "RandomStream":
        """Derive an independent sub-stream; string keys are hashed with xxh64."""
        return RandomStream(
            seed=self.seed,
            stream_id=self.stream_id,
            path=self.path + tuple(_key_to_int(k) for k in keys),
        )

    def split(self, count: int, label: StreamKey = "split") -> Tuple["RandomStream", ...]:
        base = self.child(label)
        return tuple(base.child(i) for i in range(count))

    def generator(self) -> np.random.Generator:
        seed_seq = np.random.SeedSequence(entropy=self.seed, spawn_key=self.spawn_key)
        return np.random.Generator(np.random.Philox(seed_seq))
