"""Temporal stability analysis for word embeddings.

Trains per-year skip-gram embeddings, aligns them with orthogonal
Procrustes, ingests externally produced contextual embeddings, and scores
both with four stability metrics plus bootstrap confidence intervals.
"""

from .align import AlignedSeries, AlignmentMap, align_series, procrustes, zscore
from .corpus import (KeywordSet, TimeSlice, Vocabulary, build_vocab,
                     load_default_keywords, load_keywords, load_slices,
                     shared_vocab)
from .metrics import (MetricReport, WordTrajectory, bootstrap_ci, cosine, knn,
                      lns, mts, report, rsc, sd, trajectory)
from .sgns import EmbeddingMatrix, SgnsConfig, train
from .store import (OccurrenceBatch, SeriesManifest, average_occurrences,
                    load_manifest, load_series, read_matrix, write_manifest,
                    write_matrix)
from .synth import DriftSpec, expected_ranking, generate, write_corpus
from .viz import BullseyeFrame, bullseye, render

__version__ = "0.1.0"
