"""Orthogonal Procrustes alignment into a base year's frame, plus z-scoring.

Pipeline order matters: align first, then z-score each aligned matrix.
Z-scoring is not an orthogonal map, so standardizing before alignment would
invalidate the Procrustes model.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .corpus import Vocabulary, shared_vocab
from .errors import DataError, NumericError
from .sgns import STATIC_TRAINED, EmbeddingMatrix

ORTHOGONALITY_TOL = 1e-8


@dataclass(frozen=True)
class AlignmentMap:
    """Rotation taking one year's embedding into the base year's frame."""

    source_year: int
    base_year: int
    rotation: np.ndarray  # dimension x dimension orthogonal matrix
    shared_size: int
    residual: float  # Frobenius norm of X @ Q - Y over the shared rows

    def __post_init__(self):
        q = np.asarray(self.rotation, dtype=np.float64)
        object.__setattr__(self, "rotation", q)
        err = np.abs(q.T @ q - np.eye(q.shape[0])).max()
        if err > ORTHOGONALITY_TOL:
            raise NumericError(
                f"alignment {self.source_year}->{self.base_year}: rotation not "
                f"orthogonal (max deviation {err:.3e})"
            )


def _shared_rows(m: EmbeddingMatrix, tokens: Sequence[str]) -> np.ndarray:
    idx = [m.vocabulary.index[t] for t in tokens]
    return m.vectors[idx]


def procrustes(base: EmbeddingMatrix, target: EmbeddingMatrix) -> AlignmentMap:
    """Solve min_Q ||X Q - Y||_F over orthogonal Q via SVD of X^T Y.

    X is the target's shared-vocabulary rows, Y the base's. The shared
    vocabulary must have at least 2 tokens; fewer tokens than dimensions
    only triggers a warning (the rotation is then underdetermined).
    """
    common = shared_vocab(target.vocabulary, base.vocabulary)
    if len(common) < 2:
        raise DataError(
            f"only {len(common)} shared token(s) between {target.year} and "
            f"{base.year}; need at least 2"
        )
    if len(common) < target.dimension:
        warnings.warn(
            f"shared vocabulary ({len(common)}) smaller than dimension "
            f"({target.dimension}); alignment {target.year}->{base.year} is "
            "underdetermined",
            stacklevel=2,
        )
    x = _shared_rows(target, common.tokens)
    y = _shared_rows(base, common.tokens)
    try:
        u, _, vt = np.linalg.svd(x.T @ y)
    except np.linalg.LinAlgError as e:
        raise NumericError(
            f"SVD failed aligning {target.year} to {base.year}: {e}"
        ) from e
    q = u @ vt
    residual = float(np.linalg.norm(x @ q - y))
    return AlignmentMap(source_year=target.year, base_year=base.year,
                        rotation=q, shared_size=len(common), residual=residual)


@dataclass(frozen=True)
class AlignedSeries:
    """Per-year matrices over one shared vocabulary in the base year's frame."""

    matrices: tuple[EmbeddingMatrix, ...]
    base_year: int
    maps: tuple[AlignmentMap, ...]

    def __post_init__(self):
        years = [m.year for m in self.matrices]
        if years != sorted(set(years)):
            raise DataError("series years must be strictly ascending")
        tokens = self.matrices[0].vocabulary.tokens
        dim = self.matrices[0].dimension
        for m in self.matrices[1:]:
            if m.vocabulary.tokens != tokens or m.dimension != dim:
                raise DataError("aligned matrices must share vocabulary and dimension")

    @property
    def years(self) -> tuple[int, ...]:
        return tuple(m.year for m in self.matrices)

    def matrix_for(self, year: int) -> EmbeddingMatrix:
        for m in self.matrices:
            if m.year == year:
                return m
        raise KeyError(year)


def align_series(matrices: Sequence[EmbeddingMatrix], base_year: int) -> AlignedSeries:
    """Align every matrix directly to the base year (no chaining).

    All matrices are first restricted to the series-wide shared vocabulary;
    each non-base year is then rotated into the base frame by its own
    Procrustes solution.
    """
    matrices = sorted(matrices, key=lambda m: m.year)
    years = [m.year for m in matrices]
    if base_year not in years:
        raise DataError(f"base year {base_year} not in series years {years}")
    for m in matrices:
        if m.provenance != STATIC_TRAINED:
            raise DataError(
                f"align_series expects static-trained matrices; year {m.year} "
                f"has provenance {m.provenance!r}"
            )

    common = reduce(shared_vocab, (m.vocabulary for m in matrices))
    restricted = [
        EmbeddingMatrix(year=m.year, vocabulary=common,
                        vectors=_shared_rows(m, common.tokens),
                        provenance=m.provenance, standardized=m.standardized)
        for m in matrices
    ]
    base = next(m for m in restricted if m.year == base_year)
    dim = base.dimension

    out_matrices = []
    out_maps = []
    for m in restricted:
        if m.year == base_year:
            out_matrices.append(m)
            out_maps.append(AlignmentMap(source_year=base_year, base_year=base_year,
                                         rotation=np.eye(dim), shared_size=len(common),
                                         residual=0.0))
        else:
            amap = procrustes(base, m)
            out_matrices.append(
                EmbeddingMatrix(year=m.year, vocabulary=common,
                                vectors=m.vectors @ amap.rotation,
                                provenance=m.provenance, standardized=False)
            )
            out_maps.append(amap)
    return AlignedSeries(matrices=tuple(out_matrices), base_year=base_year,
                         maps=tuple(out_maps))


def zscore(m: EmbeddingMatrix, whole_matrix: bool = False) -> EmbeddingMatrix:
    """Standardize to zero mean, unit variance over the word axis.

    Default is per-dimension (column-wise) statistics; whole_matrix=True uses
    a single scalar mean/std over all entries for sensitivity checks.
    Population (ddof=0) standard deviation throughout.
    """
    if m.vectors.shape[0] < 2:
        raise DataError(f"z-scoring needs at least 2 rows, got {m.vectors.shape[0]}")
    if whole_matrix:
        std = float(m.vectors.std())
        if std == 0.0:
            raise NumericError(f"zero variance across matrix for year {m.year}")
        standardized = (m.vectors - m.vectors.mean()) / std
    else:
        mean = m.vectors.mean(axis=0)
        std = m.vectors.std(axis=0)
        dead = np.flatnonzero(std == 0.0)
        if dead.size:
            raise NumericError(
                f"zero variance in dimension {int(dead[0])} for year {m.year}"
            )
        standardized = (m.vectors - mean) / std
    return EmbeddingMatrix(year=m.year, vocabulary=m.vocabulary,
                           vectors=standardized, provenance=m.provenance,
                           standardized=True)


def zscore_series(series: AlignedSeries) -> AlignedSeries:
    """Z-score every matrix of an aligned series independently."""
    return AlignedSeries(
        matrices=tuple(zscore(m) for m in series.matrices),
        base_year=series.base_year,
        maps=series.maps,
    )
