"""Embedding interchange format, series manifests, and contextual ingestion.

Matrix files are the de facto text embedding format: a header line
``<rows> <dimension>`` followed by one line per token, the token and then
``dimension`` decimals, single-space separated, UTF-8. Values are written
with 17 significant digits so float64 round-trips bit-exactly.

Contextual occurrence files reuse the same format with rows named
``<keyword>#<counter>``, one row per keyword occurrence.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import KeywordSet, Vocabulary
from .errors import DataError, NumericError
from .sgns import CONTEXTUAL_INGESTED, STATIC_TRAINED, EmbeddingMatrix


def write_matrix(m: EmbeddingMatrix, path: str | Path) -> None:
    """Write a matrix in the interchange format. Tokens must not contain spaces."""
    lines = [f"{m.vectors.shape[0]} {m.vectors.shape[1]}"]
    for token, row in zip(m.vocabulary.tokens, m.vectors):
        if any(c.isspace() for c in token):
            raise DataError(f"token {token!r} contains whitespace; format forbids it")
        lines.append(token + " " + " ".join(f"{x:.17g}" for x in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _parse_matrix_file(path: Path) -> tuple[list[str], np.ndarray]:
    text = path.read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines:
        raise DataError(f"{path}: empty file")
    header = lines[0].split()
    if len(header) != 2:
        raise DataError(f"{path}: line 1: expected '<rows> <dimension>' header")
    try:
        rows, dim = int(header[0]), int(header[1])
    except ValueError as e:
        raise DataError(f"{path}: line 1: malformed header") from e
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != rows:
        raise DataError(
            f"{path}: line {len(body) + 2}: header declares {rows} rows, "
            f"found {len(body)}"
        )
    tokens: list[str] = []
    vectors = np.empty((rows, dim), dtype=np.float64)
    for i, line in enumerate(body):
        parts = line.split(" ")
        if len(parts) != dim + 1:
            raise DataError(
                f"{path}: line {i + 2}: expected token + {dim} values, "
                f"got {len(parts) - 1}"
            )
        tokens.append(parts[0])
        try:
            vectors[i] = [float(x) for x in parts[1:]]
        except ValueError as e:
            raise DataError(f"{path}: line {i + 2}: unparseable value") from e
        if not np.isfinite(vectors[i]).all():
            raise NumericError(f"{path}: line {i + 2}: non-finite value")
    return tokens, vectors


def read_matrix(path: str | Path, year: int = 0,
                provenance: str = STATIC_TRAINED,
                standardized: bool = False) -> EmbeddingMatrix:
    """Read an interchange-format matrix file.

    The format carries no metadata; year/provenance come from the caller
    (normally the series manifest). Occurrence counts are not serialized, so
    the reconstructed vocabulary carries count 1 per token.
    """
    tokens, vectors = _parse_matrix_file(Path(path))
    vocab = Vocabulary(tokens=tuple(tokens), counts={t: 1 for t in tokens})
    if len(set(tokens)) != len(tokens):
        raise DataError(f"{path}: duplicate token in matrix file")
    return EmbeddingMatrix(year=year, vocabulary=vocab, vectors=vectors,
                           provenance=provenance, standardized=standardized)


@dataclass(frozen=True)
class OccurrenceBatch:
    """All occurrence vectors of one keyword in one year."""

    keyword: str
    year: int
    vectors: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=np.float64)
        object.__setattr__(self, "vectors", v)
        if v.ndim != 2 or v.shape[0] < 1:
            raise ValueError("occurrence batch needs an n x dimension matrix, n >= 1")
        if not np.isfinite(v).all():
            raise NumericError(f"non-finite occurrence vector for {self.keyword!r}")


def read_occurrences(path: str | Path, year: int) -> list[OccurrenceBatch]:
    """Read an occurrence file (rows named ``<keyword>#<counter>``)."""
    tokens, vectors = _parse_matrix_file(Path(path))
    grouped: dict[str, list[np.ndarray]] = defaultdict(list)
    for token, row in zip(tokens, vectors):
        keyword, sep, _ = token.rpartition("#")
        if not sep:
            raise DataError(f"{path}: row {token!r} is not '<keyword>#<counter>'")
        grouped[keyword].append(row)
    return [OccurrenceBatch(keyword=kw, year=year, vectors=np.vstack(rows))
            for kw, rows in grouped.items()]


@dataclass(frozen=True)
class CoverageGap:
    """Keywords missing from some years, forcing their exclusion from a series."""

    missing: tuple[tuple[str, int], ...]  # (keyword, year) pairs

    def keywords(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(kw for kw, _ in self.missing))

    def __bool__(self) -> bool:
        return bool(self.missing)


def average_occurrences(batches: Sequence[OccurrenceBatch], keywords: KeywordSet,
                        years: Sequence[int]) -> tuple[list[EmbeddingMatrix], CoverageGap]:
    """Average occurrence vectors per keyword per year.

    Keywords absent from any year are dropped from the whole series (zero
    filling would fabricate drift) and reported in the CoverageGap.
    """
    known = set(keywords.all_keywords())
    per_year: dict[int, dict[str, list[np.ndarray]]] = {y: defaultdict(list) for y in years}
    dims = set()
    for b in batches:
        if b.keyword not in known:
            raise DataError(f"occurrence batch keyword {b.keyword!r} not in keyword set")
        if b.year in per_year:
            per_year[b.year][b.keyword].append(b.vectors)
            dims.add(b.vectors.shape[1])
    if len(dims) > 1:
        raise DataError(f"mixed occurrence dimensions: {sorted(dims)}")

    missing = tuple((kw, y) for kw in keywords.all_keywords()
                    for y in years if not per_year[y][kw])
    gap = CoverageGap(missing=missing)
    dropped = set(gap.keywords())
    survivors = tuple(kw for kw in keywords.all_keywords() if kw not in dropped)
    if not survivors:
        return [], gap

    matrices = []
    for y in years:
        rows = []
        counts = {}
        for kw in survivors:
            stacked = np.vstack(per_year[y][kw])
            rows.append(stacked.mean(axis=0))
            counts[kw] = stacked.shape[0]
        vocab = Vocabulary(tokens=survivors, counts=counts)
        matrices.append(EmbeddingMatrix(year=y, vocabulary=vocab,
                                        vectors=np.vstack(rows),
                                        provenance=CONTEXTUAL_INGESTED))
    return matrices, gap


@dataclass(frozen=True)
class SeriesManifest:
    """Index of an embedding series on disk: one matrix file per year."""

    name: str
    provenance: str
    dimension: int
    years: tuple[int, ...]
    files: Mapping[int, str]
    root: Path = field(default=Path("."))
    extra: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if list(self.years) != sorted(set(self.years)):
            raise DataError(f"manifest {self.name!r}: years must be strictly ascending")
        for y in self.years:
            if y not in self.files:
                raise DataError(f"manifest {self.name!r}: no file for year {y}")

    def path_for(self, year: int) -> Path:
        return self.root / self.files[year]


def load_manifest(path: str | Path) -> SeriesManifest:
    p = Path(path)
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise DataError(f"{p}: invalid JSON: {e}") from e
    required = {"name", "provenance", "dimension", "years", "files"}
    missing = required - data.keys()
    if missing:
        raise DataError(f"{p}: manifest missing keys: {sorted(missing)}")
    manifest = SeriesManifest(
        name=data["name"],
        provenance=data["provenance"],
        dimension=int(data["dimension"]),
        years=tuple(int(y) for y in data["years"]),
        files={int(y): f for y, f in data["files"].items()},
        root=p.parent,
        extra={k: v for k, v in data.items() if k not in required},
    )
    for y in manifest.years:
        if not manifest.path_for(y).is_file():
            raise DataError(f"{p}: missing matrix file for year {y}: {manifest.files[y]}")
    return manifest


def write_manifest(manifest: SeriesManifest, path: str | Path) -> None:
    data = {
        "name": manifest.name,
        "provenance": manifest.provenance,
        "dimension": manifest.dimension,
        "years": list(manifest.years),
        "files": {str(y): f for y, f in manifest.files.items()},
        **dict(manifest.extra),
    }
    Path(path).write_text(json.dumps(data, indent=2, ensure_ascii=False) + "\n",
                          encoding="utf-8")


def _looks_like_occurrence_file(path: Path) -> bool:
    with open(path, encoding="utf-8") as f:
        f.readline()
        second = f.readline()
    token = second.split(" ", 1)[0] if second else ""
    return "#" in token


def load_series(manifest: SeriesManifest,
                keywords: KeywordSet | None = None
                ) -> tuple[list[EmbeddingMatrix], CoverageGap]:
    """Load all matrices of a series.

    Contextual series whose files hold per-occurrence rows are averaged into
    per-keyword yearly matrices (requires the keyword set). Pre-averaged
    files are read as-is.
    """
    first = manifest.path_for(manifest.years[0])
    if manifest.provenance == CONTEXTUAL_INGESTED and _looks_like_occurrence_file(first):
        if keywords is None:
            raise DataError(
                f"series {manifest.name!r} holds occurrence files; a keyword set "
                "is required to average them"
            )
        batches: list[OccurrenceBatch] = []
        for y in manifest.years:
            batches.extend(read_occurrences(manifest.path_for(y), y))
        return average_occurrences(batches, keywords, manifest.years)
    matrices = [read_matrix(manifest.path_for(y), year=y, provenance=manifest.provenance)
                for y in manifest.years]
    return matrices, CoverageGap(missing=())
