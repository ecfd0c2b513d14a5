"""Skip-gram with negative sampling, one embedding matrix per time slice."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import TimeSlice, Vocabulary
from .errors import DataError, NumericError

STATIC_TRAINED = "static_trained"
CONTEXTUAL_INGESTED = "contextual_ingested"

# Final learning rate is this fraction of the initial rate.
LR_DECAY_FLOOR = 1.0 / 10_000.0
NEG_SAMPLING_POWER = 0.75


@dataclass(frozen=True)
class SgnsConfig:
    dimension: int = 100
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    initial_learning_rate: float = 0.025
    subsample_threshold: float = 1e-3
    seed: int = 1

    def __post_init__(self):
        if self.dimension < 2:
            raise ValueError(f"dimension must be >= 2, got {self.dimension}")
        if self.window < 1:
            raise ValueError(f"window must be >= 1, got {self.window}")
        if self.negatives < 1:
            raise ValueError(f"negatives must be >= 1, got {self.negatives}")
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.initial_learning_rate <= 0:
            raise ValueError("initial_learning_rate must be positive")
        if self.subsample_threshold < 0:
            raise ValueError("subsample_threshold must be non-negative")


@dataclass
class EmbeddingMatrix:
    """A (vocabulary x dimension) embedding tagged with its year and origin."""

    year: int
    vocabulary: Vocabulary
    vectors: np.ndarray
    provenance: str = STATIC_TRAINED
    standardized: bool = False
    epoch_losses: tuple[float, ...] | None = None

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2:
            raise ValueError("vectors must be a 2-D matrix")
        if self.vectors.shape[0] != len(self.vocabulary):
            raise ValueError(
                f"row count {self.vectors.shape[0]} != vocabulary size "
                f"{len(self.vocabulary)}"
            )
        if not np.isfinite(self.vectors).all():
            raise NumericError(f"non-finite values in embedding for year {self.year}")
        if self.provenance not in (STATIC_TRAINED, CONTEXTUAL_INGESTED):
            raise ValueError(f"unknown provenance {self.provenance!r}")

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]

    def vector(self, token: str) -> np.ndarray:
        return self.vectors[self.vocabulary.index[token]]


def context_pairs(document: list[int], window: int, rng: np.random.Generator):
    """Yield (center, context) index pairs with a per-position dynamic window.

    The effective window at each position is drawn uniformly from 1..window.
    Tokens are vocabulary indices; out-of-vocabulary tokens must already be
    removed.
    """
    n = len(document)
    for i in range(n):
        b = int(rng.integers(1, window + 1))
        for j in range(max(0, i - b), min(n, i + b + 1)):
            if j != i:
                yield document[i], document[j]


def _keep_probabilities(counts: np.ndarray, threshold: float) -> np.ndarray:
    """Classic frequent-token subsampling: keep with probability sqrt(t/f)."""
    if threshold <= 0:
        return np.ones(len(counts), dtype=np.float64)
    freq = counts / counts.sum()
    return np.minimum(1.0, np.sqrt(threshold / freq))


def _negative_cdf(counts: np.ndarray) -> np.ndarray:
    weights = counts.astype(np.float64) ** NEG_SAMPLING_POWER
    cdf = np.cumsum(weights)
    cdf /= cdf[-1]
    cdf[-1] = 1.0
    return cdf


def train(slice_: TimeSlice, vocab: Vocabulary, config: SgnsConfig | None = None,
          parallel: bool = False) -> EmbeddingMatrix:
    """Train one embedding matrix on a single time slice.

    Deterministic (bitwise) given the same inputs and seed when
    parallel=False. Parallel mode updates shared weights without locking and
    is only statistically reproducible.
    """
    from . import _sgns_kernel as kernel

    config = config or SgnsConfig()
    if slice_.token_count < 10 * config.dimension:
        raise DataError(
            f"insufficient data: year {slice_.year} has {slice_.token_count} tokens, "
            f"need at least {10 * config.dimension}"
        )

    index = vocab.index
    token_ids: list[int] = []
    offsets = [0]
    for doc in slice_.documents:
        ids = [index[t] for t in doc if t in index]
        if ids:
            token_ids.extend(ids)
            offsets.append(len(token_ids))
    if not token_ids:
        raise DataError(f"no in-vocabulary tokens in year {slice_.year}")

    tokens = np.asarray(token_ids, dtype=np.int32)
    doc_offsets = np.asarray(offsets, dtype=np.int64)
    counts = np.asarray([vocab.counts[t] for t in vocab.tokens], dtype=np.float64)

    rng = np.random.default_rng(config.seed)
    dim = config.dimension
    w_in = rng.uniform(-0.5 / dim, 0.5 / dim, size=(len(vocab), dim))
    w_out = np.zeros((len(vocab), dim), dtype=np.float64)

    epoch_losses = np.zeros(config.epochs, dtype=np.float64)
    run = kernel.train_parallel if parallel else kernel.train_deterministic
    run(tokens, doc_offsets, w_in, w_out,
        _negative_cdf(counts), _keep_probabilities(counts, config.subsample_threshold),
        config.window, config.negatives, config.epochs,
        config.initial_learning_rate, config.initial_learning_rate * LR_DECAY_FLOOR,
        np.uint64(config.seed & 0xFFFFFFFFFFFFFFFF), epoch_losses)

    return EmbeddingMatrix(
        year=slice_.year,
        vocabulary=vocab,
        vectors=w_in,
        provenance=STATIC_TRAINED,
        standardized=False,
        epoch_losses=tuple(epoch_losses),
    )
