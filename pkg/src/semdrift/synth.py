"""Synthetic corpora with a controlled, known drift schedule.

The drift mechanism is context replacement: the target word's window
contexts are drawn from pool A or pool B, with the pool-B probability set
per year by the mixture schedule. Pool tokens never occur outside target
windows, so the target's context distribution is fully controlled.

Background text is topical: the vocabulary is partitioned into topics and
documents are built from single-topic runs, so every background word has a
distinctive context distribution (its topic-mates) that is identical across
years. A flat i.i.d. background would leave background words mutually
interchangeable and nothing for cross-year alignment to anchor on. Topic
choice and within-topic word choice both follow Zipf(1.0).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .corpus import TimeSlice
from .errors import DataError

# Documents are built from single-topic segments of this many tokens; each
# segment boundary starts a 5-token target block with this probability.
SEGMENT_LENGTH = 15
TARGET_BLOCK_PROB = 0.15
CONTEXT_PER_SIDE = 5
WORDS_PER_TOPIC = 10


@dataclass(frozen=True)
class DriftSpec:
    """Ground truth for one synthetic corpus."""

    target_word: str
    sense_a_contexts: tuple[str, ...]
    sense_b_contexts: tuple[str, ...]
    mixture_schedule: Mapping[int, float]  # year -> P(context drawn from pool B)
    background_vocab_size: int = 200
    documents_per_year: int = 500
    tokens_per_document: int = 400
    seed: int = 0

    def __post_init__(self):
        if not self.sense_a_contexts or not self.sense_b_contexts:
            raise DataError("context pools must be non-empty")
        overlap = set(self.sense_a_contexts) & set(self.sense_b_contexts)
        if overlap:
            raise DataError(f"context pools overlap: {sorted(overlap)}")
        if self.background_vocab_size < WORDS_PER_TOPIC:
            raise DataError(
                f"background vocabulary must have >= {WORDS_PER_TOPIC} words"
            )
        for y, p in self.mixture_schedule.items():
            if not 0.0 <= p <= 1.0:
                raise DataError(f"schedule[{y}]={p} outside [0, 1]")

    def is_planted_drift(self) -> bool:
        """Monotone non-constant schedules plant drift; constant ones do not."""
        vals = [self.mixture_schedule[y] for y in sorted(self.mixture_schedule)]
        if len(set(vals)) == 1:
            return False
        inc = all(a <= b for a, b in zip(vals, vals[1:]))
        dec = all(a >= b for a, b in zip(vals, vals[1:]))
        if not (inc or dec):
            raise DataError("mixture schedule must be monotone or constant")
        return True


def background_tokens(spec: DriftSpec) -> tuple[str, ...]:
    """Background vocabulary; token bgTT_RR belongs to topic TT at rank RR.

    Lower topic numbers and lower ranks are more frequent, so bg00_00 is the
    most common background token.
    """
    n_topics = spec.background_vocab_size // WORDS_PER_TOPIC
    tokens = []
    for t in range(n_topics):
        for r in range(WORDS_PER_TOPIC):
            tokens.append(f"bg{t:02d}_{r:02d}")
    return tuple(tokens)


def tracked_words(spec: DriftSpec, count: int = 20) -> tuple[str, ...]:
    """Frequent stable words to track alongside the target.

    Walks topics in descending frequency, taking the two most frequent words
    of each. Topics contributing to a sense pool are skipped: pool words
    co-occur with the target, so their contexts are not drift-free.
    """
    pool = set(spec.sense_a_contexts) | set(spec.sense_b_contexts)
    n_topics = spec.background_vocab_size // WORDS_PER_TOPIC
    picked: list[str] = []
    for t in range(n_topics):
        topic = [f"bg{t:02d}_{r:02d}" for r in range(WORDS_PER_TOPIC)]
        if any(w in pool for w in topic):
            continue
        picked.extend(topic[:2])
        if len(picked) >= count:
            return tuple(picked[:count])
    raise DataError(
        f"cannot track {count} words: only {len(picked)} drift-free candidates"
    )


def _zipf_cdf(n: int) -> np.ndarray:
    w = 1.0 / np.arange(1, n + 1)
    cdf = np.cumsum(w / w.sum())
    cdf[-1] = 1.0
    return cdf


def generate(spec: DriftSpec, years: Sequence[int]) -> list[TimeSlice]:
    """Generate one TimeSlice per year, deterministic given the spec seed."""
    years = sorted(years)
    for y in years:
        if y not in spec.mixture_schedule:
            raise DataError(f"mixture schedule undefined for year {y}")
    spec.is_planted_drift()  # validates monotonicity

    bg = np.array(background_tokens(spec))
    n_topics = len(bg) // WORDS_PER_TOPIC
    topic_cdf = _zipf_cdf(n_topics)
    word_cdf = _zipf_cdf(WORDS_PER_TOPIC)
    pool_a = tuple(spec.sense_a_contexts)
    pool_b = tuple(spec.sense_b_contexts)
    ctx_width = 2 * CONTEXT_PER_SIDE
    n_seg = -(-spec.tokens_per_document // SEGMENT_LENGTH)  # ceil

    slices = []
    for y in years:
        rng = np.random.default_rng(np.random.SeedSequence((spec.seed, y)))
        p_b = spec.mixture_schedule[y]
        docs = []
        for _ in range(spec.documents_per_year):
            topics = np.searchsorted(topic_cdf, rng.random(n_seg), side="right")
            ranks = np.searchsorted(word_cdf, rng.random((n_seg, SEGMENT_LENGTH)),
                                    side="right")
            words = bg[topics[:, None] * WORDS_PER_TOPIC + ranks]
            is_block = rng.random(n_seg) < TARGET_BLOCK_PROB
            use_b = rng.random(n_seg) < p_b
            a_draw = rng.integers(0, len(pool_a), size=(n_seg, ctx_width))
            b_draw = rng.integers(0, len(pool_b), size=(n_seg, ctx_width))
            doc: list[str] = []
            for s in range(n_seg):
                if is_block[s]:
                    pool, draw = ((pool_b, b_draw) if use_b[s]
                                  else (pool_a, a_draw))
                    ctx = [pool[i] for i in draw[s]]
                    doc.extend(ctx[:CONTEXT_PER_SIDE])
                    doc.append(spec.target_word)
                    doc.extend(ctx[CONTEXT_PER_SIDE:])
                doc.extend(words[s])
            docs.append(doc[: spec.tokens_per_document + 5 * int(is_block.sum())])
        slices.append(TimeSlice.from_documents(y, docs))
    return slices


def expected_ranking(specs: DriftSpec | Sequence[DriftSpec]) -> list[str]:
    """The oracle: which word should top the drift ranking.

    The planted word is expected to attain the highest rate of change and
    the lowest endpoint cosine among tracked words. No-drift specs predict
    no mover at all.
    """
    if isinstance(specs, DriftSpec):
        specs = [specs]
    planted = [s.target_word for s in specs if s.is_planted_drift()]
    if len(planted) > 1:
        raise DataError(f"exactly one planted word expected, got {planted}")
    return planted


def write_corpus(slices: Sequence[TimeSlice], path: str | Path) -> None:
    """Write slices as a standard corpus directory (<year>.txt, doc per line)."""
    root = Path(path)
    root.mkdir(parents=True, exist_ok=True)
    for s in slices:
        lines = (" ".join(doc) for doc in s.documents)
        (root / f"{s.year}.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
