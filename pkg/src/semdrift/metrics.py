"""Stability metrics over an embedding series, with bootstrap aggregation.

Four per-word metrics:
  - semantic displacement: cosine between first-year and last-year vectors
    (high = stable over the span);
  - mean temporal similarity: average cosine over consecutive-year pairs;
  - rate of semantic change: average of 1 - consecutive cosine, the exact
    complement of mean temporal similarity;
  - local neighborhood stability: fraction of top-k cosine neighbors shared
    between two years.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .align import AlignedSeries, zscore
from .corpus import KeywordSet
from .errors import DataError
from .sgns import EmbeddingMatrix

log = logging.getLogger(__name__)

METRIC_NAMES = ("sd", "mts", "rsc", "lns")
LNS_MODES = ("endpoints", "mean_consecutive")


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity, clamped to [-1, 1] against rounding."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    uu = float(np.dot(u, u))
    vv = float(np.dot(v, v))
    if uu == 0.0 or vv == 0.0:
        raise DataError("cosine undefined for zero-norm vector")
    # single sqrt of the product keeps cos(u, u) exactly 1.0
    return float(np.clip(np.dot(u, v) / np.sqrt(uu * vv), -1.0, 1.0))


@dataclass(frozen=True)
class WordTrajectory:
    """One word's vector per year, in chronological order."""

    word: str
    vectors: tuple[np.ndarray, ...]
    years: tuple[int, ...]

    def __post_init__(self):
        if len(self.vectors) != len(self.years) or len(self.years) < 2:
            raise DataError(f"trajectory for {self.word!r} needs >= 2 matching years")
        if list(self.years) != sorted(set(self.years)):
            raise DataError(f"trajectory years not strictly ascending: {self.years}")
        dims = {v.shape[-1] for v in self.vectors}
        if len(dims) != 1:
            raise DataError(f"trajectory for {self.word!r} mixes dimensions {dims}")
        for v, y in zip(self.vectors, self.years):
            if np.linalg.norm(v) == 0.0:
                raise DataError(f"zero vector for {self.word!r} in {y}")


def trajectory(word: str, matrices: Sequence[EmbeddingMatrix]) -> WordTrajectory:
    """Extract one word's per-year trajectory from a series of matrices."""
    return WordTrajectory(
        word=word,
        vectors=tuple(m.vector(word) for m in matrices),
        years=tuple(m.year for m in matrices),
    )


def sd(traj: WordTrajectory) -> float:
    """Endpoint cosine: first year vs last year."""
    return cosine(traj.vectors[0], traj.vectors[-1])


def _consecutive_cosines(traj: WordTrajectory) -> list[float]:
    return [cosine(a, b) for a, b in zip(traj.vectors, traj.vectors[1:])]


def mts(traj: WordTrajectory) -> float:
    """Mean cosine over consecutive-year pairs."""
    cos = _consecutive_cosines(traj)
    return sum(cos) / len(cos)


def rsc(traj: WordTrajectory) -> float:
    """Mean of 1 - consecutive cosine; complement of mts."""
    cos = _consecutive_cosines(traj)
    return sum(1.0 - c for c in cos) / len(cos)


@dataclass(frozen=True)
class KnnResult:
    words: tuple[str, ...]
    short_list: bool  # fewer than k candidates existed


def knn(word: str, matrix: EmbeddingMatrix, k: int,
        universe: Sequence[str] | None = None) -> KnnResult:
    """Top-k cosine neighbors of a word, excluding the word itself.

    Ties are broken lexicographically so results are platform-deterministic.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    vocab = matrix.vocabulary
    if word not in vocab:
        raise DataError(f"word {word!r} not in vocabulary")
    if universe is None:
        candidates = [t for t in vocab.tokens if t != word]
    else:
        for t in universe:
            if t not in vocab:
                raise DataError(f"universe word {t!r} not in vocabulary")
        candidates = [t for t in universe if t != word]
    if not candidates:
        return KnnResult(words=(), short_list=True)

    idx = np.array([vocab.index[t] for t in candidates])
    rows = matrix.vectors[idx]
    norms = np.linalg.norm(rows, axis=1)
    q = matrix.vector(word)
    qn = np.linalg.norm(q)
    if qn == 0.0 or (norms == 0.0).any():
        raise DataError("cosine undefined for zero-norm vector")
    sims = (rows @ q) / (norms * qn)
    # lexsort: last key is primary, so sort by -sim then token rank
    token_rank = np.argsort(np.argsort(candidates))
    order = np.lexsort((token_rank, -sims))
    top = order[:k]
    return KnnResult(words=tuple(candidates[i] for i in top),
                     short_list=len(candidates) < k)


def lns(word: str, m1: EmbeddingMatrix, m2: EmbeddingMatrix, k: int = 10,
        universe: Sequence[str] | None = None) -> float:
    """Neighbor-set overlap between two years, divided by k."""
    n1 = set(knn(word, m1, k, universe).words)
    n2 = set(knn(word, m2, k, universe).words)
    return len(n1 & n2) / k


@dataclass(frozen=True)
class BootstrapResult:
    mean: float
    margin: float


def bootstrap_ci(values: Sequence[float], resamples: int = 1000,
                 confidence: float = 0.95, seed: int = 0) -> BootstrapResult:
    """Percentile bootstrap of the mean.

    Margin is the half-width of the central `confidence` interval over
    resampled means (with-replacement resamples of the original size).
    """
    vals = np.asarray(values, dtype=np.float64)
    if vals.size == 0:
        raise DataError("bootstrap over empty sample")
    if resamples < 1:
        raise ValueError(f"resamples must be >= 1, got {resamples}")
    mean = float(vals.mean())
    if vals.size == 1 or np.ptp(vals) == 0.0:
        return BootstrapResult(mean=mean, margin=0.0)
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, vals.size, size=(resamples, vals.size))
    means = vals[idx].mean(axis=1)
    tail = 100.0 * (1.0 - confidence) / 2.0
    lo, hi = np.percentile(means, [tail, 100.0 - tail])
    return BootstrapResult(mean=mean, margin=float((hi - lo) / 2.0))


@dataclass(frozen=True)
class MetricReport:
    """Per-word and aggregate metric values for one series and span."""

    per_word: Mapping[str, Mapping[str, float]]
    aggregate: Mapping[str, Mapping[str, float]]  # metric -> {mean, margin, confidence}
    span_years: int
    model_name: str
    k: int
    lns_mode: str = "endpoints"
    lns_universe: str = "full_vocabulary"
    coverage_gaps: tuple[tuple[str, int], ...] = ()

    def to_dict(self) -> dict:
        return {
            "model": self.model_name,
            "span_years": self.span_years,
            "k": self.k,
            "lns_mode": self.lns_mode,
            "lns_universe": self.lns_universe,
            "coverage_gaps": [list(g) for g in self.coverage_gaps],
            "per_word": {w: dict(v) for w, v in self.per_word.items()},
            "aggregate": {m: dict(v) for m, v in self.aggregate.items()},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False, sort_keys=True)

    def csv_row(self) -> dict[str, str]:
        row = {"time_span": f"{self.span_years} years", "model": self.model_name}
        for m in METRIC_NAMES:
            agg = self.aggregate[m]
            row[m] = f"{agg['mean']:.3f} ± {agg['margin']:.3f}"
        return row

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=["time_span", "model", *METRIC_NAMES])
        writer.writeheader()
        writer.writerow(self.csv_row())
        return buf.getvalue()


def comparison_csv(reports: Sequence[MetricReport]) -> str:
    """One row per (span, series), mirroring the reference table layout."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["time_span", "model", *METRIC_NAMES])
    writer.writeheader()
    for r in reports:
        writer.writerow(r.csv_row())
    return buf.getvalue()


def report(series: AlignedSeries | Sequence[EmbeddingMatrix], keywords: KeywordSet,
           k: int = 10, lns_mode: str = "endpoints", model_name: str = "series",
           standardize: bool = True, resamples: int = 1000,
           confidence: float = 0.95, seed: int = 0) -> MetricReport:
    """Compute all four metrics per keyword plus bootstrap aggregates.

    Keywords missing from any year are dropped (coverage-gap policy) and
    listed in the report. For contextual series the neighbor universe is the
    keyword vocabulary itself; k is then capped at |universe| - 1.
    """
    if lns_mode not in LNS_MODES:
        raise ValueError(f"lns_mode must be one of {LNS_MODES}, got {lns_mode!r}")
    matrices = list(series.matrices) if isinstance(series, AlignedSeries) else list(series)
    if len(matrices) < 2:
        raise DataError(f"need >= 2 years of embeddings, got {len(matrices)}")
    if standardize:
        matrices = [m if m.standardized else zscore(m) for m in matrices]

    vocab_tokens = set(matrices[0].vocabulary.tokens)
    for m in matrices[1:]:
        vocab_tokens &= set(m.vocabulary.tokens)
    tracked = [w for w in keywords.all_keywords() if w in vocab_tokens]
    gaps = tuple(
        (w, m.year)
        for w in keywords.all_keywords() if w not in vocab_tokens
        for m in matrices if w not in m.vocabulary
    )
    if gaps:
        log.warning("coverage gaps, dropping keywords: %s",
                    sorted({w for w, _ in gaps}))
    if not tracked:
        raise DataError("no keyword present in every year of the series")

    contextual = all(m.provenance == "contextual_ingested" for m in matrices)
    if contextual:
        universe = matrices[0].vocabulary.tokens
        lns_universe = "keyword_set"
    else:
        universe = None
        lns_universe = "full_vocabulary"
    universe_size = (len(universe) if universe is not None
                     else len(matrices[0].vocabulary))
    k_eff = min(k, universe_size - 1)
    if k_eff < k:
        warnings.warn(
            f"k reduced from {k} to {k_eff}: neighbor universe has only "
            f"{universe_size} words",
            stacklevel=2,
        )

    per_word = {}
    for w in tracked:
        traj = trajectory(w, matrices)
        if lns_mode == "endpoints":
            word_lns = lns(w, matrices[0], matrices[-1], k_eff, universe)
        else:
            pair_vals = [lns(w, a, b, k_eff, universe)
                         for a, b in zip(matrices, matrices[1:])]
            word_lns = sum(pair_vals) / len(pair_vals)
        per_word[w] = {"sd": sd(traj), "mts": mts(traj), "rsc": rsc(traj),
                       "lns": word_lns}

    aggregate = {}
    for i, m in enumerate(METRIC_NAMES):
        vals = [per_word[w][m] for w in tracked]
        boot = bootstrap_ci(vals, resamples=resamples, confidence=confidence,
                            seed=seed + i)
        aggregate[m] = {"mean": boot.mean, "margin": boot.margin,
                        "confidence": confidence}

    span = matrices[-1].year - matrices[0].year + 1
    return MetricReport(per_word=per_word, aggregate=aggregate, span_years=span,
                        model_name=model_name, k=k_eff, lns_mode=lns_mode,
                        lns_universe=lns_universe, coverage_gaps=gaps)
