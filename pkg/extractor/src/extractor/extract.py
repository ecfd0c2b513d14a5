"""Batched transformer inference producing per-occurrence keyword vectors.

For each year, only documents containing at least one keyword are encoded.
Every keyword occurrence yields one vector: the mean over the keyword's
subword pieces taken from the selected hidden layer. Output files use the
semdrift interchange format with rows named `<keyword>#<n>`, plus a
`manifest.json` indexing the series.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import numpy as np
import torch
from transformers import AutoModel, AutoTokenizer

from .job import ExtractionJob


def load_keywords(path: Path) -> tuple[str, ...]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValueError(f"{path}: expected a JSON object of category -> keywords")
    seen: dict[str, None] = {}
    for cat, words in data.items():
        if not isinstance(words, list):
            raise ValueError(f"{path}: category {cat!r} must map to a list")
        for w in words:
            seen[w] = None
    if not seen:
        raise ValueError(f"{path}: no keywords")
    return tuple(seen)


def read_documents(corpus_path: Path, year: int) -> list[list[str]]:
    f = Path(corpus_path) / f"{year}.txt"
    if not f.is_file():
        raise FileNotFoundError(f"missing corpus slice {year}: expected {f}")
    docs = []
    for line in f.read_text(encoding="utf-8").splitlines():
        tokens = line.split()
        if tokens:
            docs.append(tokens)
    return docs


def _unextractable(tokenizer, keywords: Sequence[str]) -> list[str]:
    """Keywords whose every subword piece is the unknown token."""
    bad = []
    for kw in keywords:
        pieces = tokenizer.tokenize(kw)
        if not pieces or all(p == tokenizer.unk_token for p in pieces):
            bad.append(kw)
    return bad


def _format_row(name: str, vec: np.ndarray) -> str:
    return name + " " + " ".join(f"{x:.17g}" for x in vec)


def extract(job: ExtractionJob) -> dict:
    """Run the job; returns the manifest dict (also written to disk)."""
    tokenizer = AutoTokenizer.from_pretrained(job.model)
    model = AutoModel.from_pretrained(job.model)
    model.eval()
    dimension = model.config.hidden_size

    keywords = load_keywords(job.keyword_file)
    unextractable = _unextractable(tokenizer, keywords)
    usable = set(keywords) - set(unextractable)

    out = Path(job.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    files: dict[int, str] = {}
    counts: dict[str, dict[int, int]] = {kw: {} for kw in keywords}
    truncated: dict[int, int] = {}

    for year in job.years:
        docs = [d for d in read_documents(job.corpus_path, year)
                if any(t in usable for t in d)]
        rows: list[str] = []
        year_counts = {kw: 0 for kw in usable}
        year_truncated = 0
        for start in range(0, len(docs), job.batch_size):
            batch = docs[start:start + job.batch_size]
            enc = tokenizer(batch, is_split_into_words=True, padding=True,
                            truncation=True, max_length=job.max_sequence_length,
                            return_tensors="pt")
            with torch.no_grad():
                hidden = model(**enc).last_hidden_state  # last_hidden layer
            for b, doc in enumerate(batch):
                word_ids = enc.word_ids(b)
                surviving = {w for w in word_ids if w is not None}
                if len(surviving) < len(doc):
                    year_truncated += 1
                for pos, token in enumerate(doc):
                    if token not in usable or pos not in surviving:
                        continue
                    piece_idx = [i for i, w in enumerate(word_ids) if w == pos]
                    vec = hidden[b, piece_idx].mean(dim=0).numpy()
                    rows.append(_format_row(f"{token}#{year_counts[token]}", vec))
                    year_counts[token] += 1
        fname = f"{year}.vec"
        (out / fname).write_text(
            f"{len(rows)} {dimension}\n" + "\n".join(rows)
            + ("\n" if rows else ""), encoding="utf-8")
        files[year] = fname
        truncated[year] = year_truncated
        for kw, n in year_counts.items():
            counts[kw][year] = n

    manifest = {
        "name": out.name,
        "provenance": "contextual_ingested",
        "dimension": dimension,
        "years": list(job.years),
        "files": {str(y): f for y, f in files.items()},
        "counts": {kw: {str(y): n for y, n in by_year.items()}
                   for kw, by_year in counts.items()},
        "unextractable": sorted(unextractable),
        "truncated_documents": {str(y): n for y, n in truncated.items()},
        "model": job.model,
        "layer": job.layer,
        "occurrence_vector": "mean over the keyword's subword pieces",
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8")
    return manifest
