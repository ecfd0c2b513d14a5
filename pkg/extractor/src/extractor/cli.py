"""CLI mirroring the ExtractionJob fields."""

from __future__ import annotations

import sys

import click

from .extract import extract
from .job import DEFAULT_MODEL, LAYERS, ExtractionJob


@click.command()
@click.option("--corpus", "corpus_path", required=True, type=click.Path())
@click.option("--years", required=True, help="Year range, e.g. 2019:2023.")
@click.option("--keywords", "keyword_file", required=True, type=click.Path())
@click.option("--out", "output_dir", required=True, type=click.Path())
@click.option("--model", default=DEFAULT_MODEL, show_default=True)
@click.option("--batch-size", default=128, show_default=True)
@click.option("--max-seq-len", default=512, show_default=True)
@click.option("--layer", default="last_hidden", type=click.Choice(LAYERS),
              show_default=True)
def main(corpus_path, years, keyword_file, output_dir, model, batch_size,
         max_seq_len, layer):
    """Extract per-keyword contextual occurrence vectors from a yearly corpus."""
    try:
        first, last = (int(p) for p in years.split(":"))
    except ValueError:
        click.echo(f"error: years must look like 2019:2023, got {years!r}", err=True)
        sys.exit(2)
    try:
        job = ExtractionJob(
            corpus_path=corpus_path, years=tuple(range(first, last + 1)),
            keyword_file=keyword_file, output_dir=output_dir, model=model,
            batch_size=batch_size, max_sequence_length=max_seq_len, layer=layer)
    except ValueError as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(2)
    try:
        manifest = extract(job)
    except (FileNotFoundError, ValueError) as e:
        click.echo(f"error: {e}", err=True)
        sys.exit(3)
    total = sum(sum(by_year.values()) for by_year in manifest["counts"].values())
    click.echo(f"wrote {total} occurrence vectors across "
               f"{len(manifest['years'])} years to {output_dir}")


if __name__ == "__main__":
    main()
