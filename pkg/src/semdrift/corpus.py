"""Corpus loading, per-year time slices, vocabularies, and keyword sets.

Corpus layout on disk: one UTF-8 file per year named ``<year>.txt``, one
document per line, tokens separated by whitespace. Tokenization happens
upstream; this module consumes already-segmented text.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .errors import DataError

DEFAULT_MIN_COUNT = 5


@dataclass(frozen=True)
class TimeSlice:
    """One year's worth of tokenized documents."""

    year: int
    documents: tuple[tuple[str, ...], ...]
    token_count: int

    @classmethod
    def from_documents(cls, year: int, documents: Iterable[Sequence[str]]) -> "TimeSlice":
        """Build a slice, dropping empty documents."""
        docs = tuple(tuple(d) for d in documents if len(d) > 0)
        return cls(year=year, documents=docs, token_count=sum(len(d) for d in docs))


@dataclass(frozen=True)
class Vocabulary:
    """Ordered token inventory with occurrence counts.

    Ordering is by descending count with lexicographic tie-break, so two
    builds over the same data produce identical index assignments.
    """

    tokens: tuple[str, ...]
    counts: Mapping[str, int]
    index: Mapping[str, int] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.index is None:
            object.__setattr__(self, "index", {t: i for i, t in enumerate(self.tokens)})

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index


def _ordered_tokens(counts: Mapping[str, int]) -> tuple[str, ...]:
    return tuple(sorted(counts, key=lambda t: (-counts[t], t)))


def build_vocab(slice_: TimeSlice, min_count: int = DEFAULT_MIN_COUNT) -> Vocabulary:
    """Count tokens in a slice and keep those occurring at least min_count times."""
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")
    counts = Counter()
    for doc in slice_.documents:
        counts.update(doc)
    kept = {t: c for t, c in counts.items() if c >= min_count}
    if not kept:
        raise DataError(
            f"empty vocabulary for year {slice_.year} at min_count={min_count}"
        )
    return Vocabulary(tokens=_ordered_tokens(kept), counts=kept)


def shared_vocab(a: Vocabulary, b: Vocabulary) -> Vocabulary:
    """Intersect two vocabularies; counts are the per-token minimum."""
    common = {t: min(a.counts[t], b.counts[t]) for t in a.counts if t in b.counts}
    if not common:
        raise DataError("vocabularies share no tokens; alignment impossible")
    return Vocabulary(tokens=_ordered_tokens(common), counts=common)


def load_slices(path: str | Path, span: tuple[int, int]) -> list[TimeSlice]:
    """Load one TimeSlice per year for the inclusive span (first, last).

    Missing year files and undecodable bytes are reported as DataError.
    """
    root = Path(path)
    first, last = span
    if first > last:
        raise ValueError(f"invalid span {first}-{last}")
    slices = []
    for year in range(first, last + 1):
        f = root / f"{year}.txt"
        if not f.is_file():
            raise DataError(f"missing slice {year}: expected {f}")
        raw = f.read_bytes()
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise DataError(
                f"{f} is not valid UTF-8 at byte offset {e.start}"
            ) from e
        docs = (line.split() for line in text.splitlines())
        slices.append(TimeSlice.from_documents(year, docs))
    return slices


@dataclass(frozen=True)
class KeywordSet:
    """Analysis keywords grouped by category; keywords are globally distinct."""

    categories: Mapping[str, tuple[str, ...]]

    def __post_init__(self):
        if not self.categories:
            raise DataError("keyword set has no categories")
        seen: dict[str, str] = {}
        for cat, words in self.categories.items():
            if not words:
                raise DataError(f"empty keyword category: {cat!r}")
            for w in words:
                if w in seen:
                    raise DataError(
                        f"keyword {w!r} appears in categories {seen[w]!r} and {cat!r}"
                    )
                seen[w] = cat

    def all_keywords(self) -> tuple[str, ...]:
        """All keywords in category order, then listed order."""
        return tuple(w for words in self.categories.values() for w in words)


def load_keywords(path: str | Path) -> KeywordSet:
    """Read a keyword file: a JSON object mapping category -> list of keywords."""
    p = Path(path)
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise DataError(f"{p}: invalid JSON: {e}") from e
    if not isinstance(data, dict):
        raise DataError(f"{p}: expected a JSON object of category -> keywords")
    categories = {}
    for cat, words in data.items():
        if not isinstance(words, list) or not all(isinstance(w, str) for w in words):
            raise DataError(f"{p}: category {cat!r} must map to an array of strings")
        categories[cat] = tuple(words)
    return KeywordSet(categories=categories)


def default_keyword_path() -> Path:
    """Path of the bundled default keyword file (five categories)."""
    return Path(__file__).parent / "data" / "keywords_default.json"


def load_default_keywords() -> KeywordSet:
    return load_keywords(default_keyword_path())
