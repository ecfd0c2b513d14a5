"""Shared constructors for test matrices and corpus slices."""

import numpy as np

from semdrift.corpus import TimeSlice, Vocabulary
from semdrift.sgns import EmbeddingMatrix


def make_matrix(tokens, vectors, year=2020, provenance="static_trained",
                standardized=False):
    vocab = Vocabulary(tokens=tuple(tokens), counts={t: 1 for t in tokens})
    return EmbeddingMatrix(year=year, vocabulary=vocab,
                           vectors=np.asarray(vectors, dtype=np.float64),
                           provenance=provenance, standardized=standardized)


def random_matrix(rng, n_tokens, dim, year=2020, prefix="w"):
    tokens = [f"{prefix}{i:04d}" for i in range(n_tokens)]
    return make_matrix(tokens, rng.standard_normal((n_tokens, dim)), year=year)


def corpus_slice(year, docs):
    return TimeSlice.from_documents(year, docs)
