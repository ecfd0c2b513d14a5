"""Extraction job description and validation."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

DEFAULT_MODEL = "bert-base-chinese"
LAYERS = ("last_hidden",)


@dataclass(frozen=True)
class ExtractionJob:
    """Everything needed to turn raw yearly text into occurrence vectors.

    `corpus_path` holds one `<year>.txt` per year with one whitespace-
    tokenized document per line; `keyword_file` is a JSON object mapping
    category name to a list of keywords.
    """

    corpus_path: Path
    years: tuple[int, ...]
    keyword_file: Path
    output_dir: Path
    model: str = DEFAULT_MODEL
    batch_size: int = 128
    max_sequence_length: int = 512
    layer: str = "last_hidden"

    def __post_init__(self):
        object.__setattr__(self, "corpus_path", Path(self.corpus_path))
        object.__setattr__(self, "keyword_file", Path(self.keyword_file))
        object.__setattr__(self, "output_dir", Path(self.output_dir))
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.max_sequence_length < 2:
            raise ValueError(
                f"max_sequence_length must be >= 2, got {self.max_sequence_length}"
            )
        if self.layer not in LAYERS:
            raise ValueError(f"layer must be one of {LAYERS}, got {self.layer!r}")
        if not self.years:
            raise ValueError("no years requested")
        if list(self.years) != sorted(set(self.years)):
            raise ValueError(f"years must be strictly ascending: {self.years}")
