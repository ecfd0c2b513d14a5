"""Command-line pipeline: ingest -> train/ingest -> align -> standardize ->
metrics -> reports and plots, driven by one TOML or JSON config.

Exit codes: 0 ok, 2 config error, 3 data error, 4 numeric failure.
"""

from __future__ import annotations

import dataclasses
import json
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib
from typing import Sequence

import click

from . import align as align_mod
from . import corpus as corpus_mod
from . import metrics as metrics_mod
from . import sgns as sgns_mod
from . import store as store_mod
from . import synth as synth_mod
from . import viz as viz_mod
from .errors import ConfigError, DataError, ToolkitError

DEFAULT_SPANS = (3, 5, 10, 20)


@dataclasses.dataclass
class SeriesSpec:
    name: str
    kind: str  # "train" | "ingest"
    manifest_path: str | None = None


@dataclasses.dataclass
class PipelineConfig:
    corpus_path: str
    span: tuple[int, int]
    base_year: int
    output_dir: str
    keyword_file: str | None = None
    sgns: sgns_mod.SgnsConfig = dataclasses.field(default_factory=sgns_mod.SgnsConfig)
    min_count: int = corpus_mod.DEFAULT_MIN_COUNT
    k: int = 10
    lns_mode: str = "endpoints"
    standardize: bool = True
    bootstrap_resamples: int = 1000
    bootstrap_confidence: float = 0.95
    bootstrap_seed: int = 0
    spans: tuple[int, ...] | None = None
    series: tuple[SeriesSpec, ...] = ()
    bullseye_words: tuple[str, ...] = ()
    deterministic: bool = True

    def validate(self) -> None:
        first, last = self.span
        if first > last:
            raise ConfigError(f"invalid span {first}-{last}")
        if not first <= self.base_year <= last:
            raise ConfigError(
                f"base_year {self.base_year} outside span {first}-{last}"
            )
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.lns_mode not in metrics_mod.LNS_MODES:
            raise ConfigError(f"lns_mode must be one of {metrics_mod.LNS_MODES}")
        if not self.series:
            raise ConfigError("no series configured")
        total = last - first + 1
        for s in self.effective_spans():
            if s < 2 or s > total:
                raise ConfigError(f"span length {s} does not fit in {total} years")
        for s in self.series:
            if s.kind not in ("train", "ingest"):
                raise ConfigError(f"series {s.name!r}: kind must be train or ingest")
            if s.kind == "ingest":
                if not s.manifest_path:
                    raise ConfigError(f"series {s.name!r}: ingest needs manifest_path")
                if not Path(s.manifest_path).is_file():
                    raise ConfigError(
                        f"series {s.name!r}: manifest {s.manifest_path} not found"
                    )

    def effective_spans(self) -> tuple[int, ...]:
        if self.spans:
            return self.spans
        total = self.span[1] - self.span[0] + 1
        fitting = tuple(s for s in DEFAULT_SPANS if s <= total)
        return fitting or (total,)


def load_config(path: str | Path) -> PipelineConfig:
    p = Path(path)
    try:
        if p.suffix == ".toml":
            data = tomllib.loads(p.read_text(encoding="utf-8"))
        else:
            data = json.loads(p.read_text(encoding="utf-8"))
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
        raise ConfigError(f"{p}: cannot parse config: {e}") from e
    except FileNotFoundError as e:
        raise ConfigError(f"config file not found: {p}") from e
    return config_from_dict(data)


def config_from_dict(data: dict) -> PipelineConfig:
    try:
        sgns_cfg = sgns_mod.SgnsConfig(**data.get("sgns", {}))
        boot = data.get("bootstrap", {})
        series = tuple(SeriesSpec(**s) for s in data.get("series", []))
        cfg = PipelineConfig(
            corpus_path=data["corpus_path"],
            span=(int(data["span"][0]), int(data["span"][1])),
            base_year=int(data["base_year"]),
            output_dir=data["output_dir"],
            keyword_file=data.get("keyword_file"),
            sgns=sgns_cfg,
            min_count=int(data.get("min_count", corpus_mod.DEFAULT_MIN_COUNT)),
            k=int(data.get("k", 10)),
            lns_mode=data.get("lns_mode", "endpoints"),
            standardize=bool(data.get("standardize", True)),
            bootstrap_resamples=int(boot.get("resamples", 1000)),
            bootstrap_confidence=float(boot.get("confidence", 0.95)),
            bootstrap_seed=int(boot.get("seed", 0)),
            spans=tuple(int(s) for s in data["spans"]) if "spans" in data else None,
            series=series,
            bullseye_words=tuple(data.get("bullseye_words", [])),
            deterministic=bool(data.get("deterministic", True)),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ConfigError(f"invalid config: {e}") from e
    cfg.validate()
    return cfg


def _load_keywords(cfg: PipelineConfig) -> corpus_mod.KeywordSet:
    if cfg.keyword_file:
        return corpus_mod.load_keywords(cfg.keyword_file)
    return corpus_mod.load_default_keywords()


def _train_series(cfg: PipelineConfig) -> list[sgns_mod.EmbeddingMatrix]:
    slices = corpus_mod.load_slices(cfg.corpus_path, cfg.span)
    matrices = []
    for s in slices:
        vocab = corpus_mod.build_vocab(s, cfg.min_count)
        year_cfg = dataclasses.replace(cfg.sgns, seed=cfg.sgns.seed + s.year)
        matrices.append(sgns_mod.train(s, vocab, year_cfg,
                                       parallel=not cfg.deterministic))
    return matrices


def _series_reports(name: str, matrices, cfg: PipelineConfig,
                    keywords: corpus_mod.KeywordSet, residuals: dict,
                    is_static: bool):
    """Align (static only), then produce one report per configured span."""
    if is_static:
        aligned = align_mod.align_series(matrices, cfg.base_year)
        residuals[name] = {str(m.source_year): m.residual for m in aligned.maps}
        matrices = list(aligned.matrices)
    reports = []
    for span in cfg.effective_spans():
        window = matrices[-span:]
        reports.append(metrics_mod.report(
            window, keywords, k=cfg.k, lns_mode=cfg.lns_mode, model_name=name,
            standardize=cfg.standardize, resamples=cfg.bootstrap_resamples,
            confidence=cfg.bootstrap_confidence, seed=cfg.bootstrap_seed,
        ))
    return matrices, reports


def run(cfg: PipelineConfig) -> list[Path]:
    """Execute the full pipeline; returns the written artifact paths.

    Partial outputs are removed if any stage fails.
    """
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    def emit(path: Path, text: str) -> None:
        path.write_text(text, encoding="utf-8")
        written.append(path)

    try:
        keywords = _load_keywords(cfg)
        residuals: dict[str, dict] = {}
        all_reports: list[metrics_mod.MetricReport] = []
        full_series: dict[str, list] = {}

        for s in cfg.series:
            if s.kind == "train":
                matrices = _train_series(cfg)
                matrices, reports = _series_reports(
                    s.name, matrices, cfg, keywords, residuals, is_static=True)
            else:
                manifest = store_mod.load_manifest(s.manifest_path)
                matrices, gap = store_mod.load_series(manifest, keywords)
                if not matrices:
                    raise DataError(
                        f"series {s.name!r}: no keyword survives coverage gaps"
                    )
                matrices, reports = _series_reports(
                    s.name, matrices, cfg, keywords, residuals, is_static=False)
            full_series[s.name] = matrices
            for r in reports:
                stem = out / f"report_{s.name}_{r.span_years}"
                emit(stem.with_suffix(".json"), r.to_json())
                emit(stem.with_suffix(".csv"), r.to_csv())
            all_reports.extend(reports)

        emit(out / "comparison.csv", metrics_mod.comparison_csv(all_reports))

        for word in cfg.bullseye_words:
            for name, matrices in full_series.items():
                if all(word in m.vocabulary for m in matrices):
                    traj = metrics_mod.trajectory(word, matrices)
                    base = (cfg.base_year if cfg.base_year in traj.years
                            else traj.years[0])
                    frame = viz_mod.bullseye(traj, base)
                    stem = out / f"bullseye_{name}_{word}"
                    viz_mod.render(frame, stem)
                    written.extend([stem.with_suffix(".svg"), stem.with_suffix(".csv")])

        manifest = {
            "config": _config_dict(cfg),
            "alignment_residuals": residuals,
            "reports": [p.name for p in written],
        }
        emit(out / "run_manifest.json",
             json.dumps(manifest, indent=2, ensure_ascii=False, sort_keys=True) + "\n")
    except Exception:
        for p in written:
            p.unlink(missing_ok=True)
        raise
    return written


def _config_dict(cfg: PipelineConfig) -> dict:
    d = dataclasses.asdict(cfg)
    d["span"] = list(cfg.span)
    d["spans"] = list(cfg.effective_spans())
    return d


def _fail(e: ToolkitError, json_errors: bool, stage: str) -> None:
    if json_errors:
        click.echo(json.dumps({"stage": stage, "error": type(e).__name__,
                               "message": str(e)}), err=True)
    else:
        click.echo(f"error [{stage}]: {e}", err=True)
    sys.exit(e.exit_code)


def _guarded(stage: str, json_errors: bool, fn):
    try:
        return fn()
    except ToolkitError as e:
        _fail(e, json_errors, stage)


@click.group()
@click.option("--json-errors", is_flag=True, help="Emit machine-readable JSON diagnostics.")
@click.pass_context
def main(ctx, json_errors):
    """Temporal word-embedding stability toolkit."""
    ctx.ensure_object(dict)
    ctx.obj["json_errors"] = json_errors


@main.command("run")
@click.argument("config_path", type=click.Path())
@click.option("--explain-config", is_flag=True,
              help="Print the effective config with all defaults and exit.")
@click.pass_context
def run_cmd(ctx, config_path, explain_config):
    """Run the full pipeline from a TOML or JSON config file."""
    je = ctx.obj["json_errors"]
    cfg = _guarded("config", je, lambda: load_config(config_path))
    if explain_config:
        click.echo(json.dumps(_config_dict(cfg), indent=2, sort_keys=True))
        return
    written = _guarded("run", je, lambda: run(cfg))
    click.echo(f"wrote {len(written)} artifacts to {cfg.output_dir}")


@main.command("train")
@click.option("--corpus", "corpus_path", required=True, type=click.Path())
@click.option("--span", required=True, help="Year range, e.g. 2019:2023.")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--min-count", default=corpus_mod.DEFAULT_MIN_COUNT, show_default=True)
@click.option("--dimension", default=100, show_default=True)
@click.option("--window", default=5, show_default=True)
@click.option("--epochs", default=5, show_default=True)
@click.option("--seed", default=1, show_default=True)
@click.pass_context
def train_cmd(ctx, corpus_path, span, out_dir, min_count, dimension, window,
              epochs, seed):
    """Train one embedding matrix per year and write a series manifest."""
    je = ctx.obj["json_errors"]

    def go():
        first, last = _parse_span(span)
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        slices = corpus_mod.load_slices(corpus_path, (first, last))
        cfg = sgns_mod.SgnsConfig(dimension=dimension, window=window,
                                  epochs=epochs, seed=seed)
        files = {}
        for s in slices:
            vocab = corpus_mod.build_vocab(s, min_count)
            m = sgns_mod.train(s, vocab, dataclasses.replace(cfg, seed=seed + s.year))
            fname = f"{s.year}.vec"
            store_mod.write_matrix(m, out / fname)
            files[s.year] = fname
        manifest = store_mod.SeriesManifest(
            name=out.name, provenance=sgns_mod.STATIC_TRAINED,
            dimension=dimension, years=tuple(sl.year for sl in slices),
            files=files, root=out)
        store_mod.write_manifest(manifest, out / "manifest.json")
        click.echo(f"trained {len(slices)} yearly matrices into {out}")

    _guarded("train", je, go)


@main.command("align")
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
@click.option("--base-year", required=True, type=int)
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--no-zscore", is_flag=True, help="Skip standardization after alignment.")
@click.pass_context
def align_cmd(ctx, manifest_path, base_year, out_dir, no_zscore):
    """Align a trained series to a base year, then z-score each matrix."""
    je = ctx.obj["json_errors"]

    def go():
        manifest = store_mod.load_manifest(manifest_path)
        matrices, _ = store_mod.load_series(manifest)
        series = align_mod.align_series(matrices, base_year)
        if not no_zscore:
            series = align_mod.zscore_series(series)
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        files = {}
        for m in series.matrices:
            fname = f"{m.year}.vec"
            store_mod.write_matrix(m, out / fname)
            files[m.year] = fname
        aligned = store_mod.SeriesManifest(
            name=manifest.name, provenance=manifest.provenance,
            dimension=series.matrices[0].dimension, years=series.years,
            files=files, root=out,
            extra={"base_year": base_year, "standardized": not no_zscore,
                   "residuals": {str(a.source_year): a.residual
                                 for a in series.maps}})
        store_mod.write_manifest(aligned, out / "manifest.json")
        click.echo(f"aligned {len(series.matrices)} matrices to base {base_year}")

    _guarded("align", je, go)


@main.command("metrics")
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
@click.option("--keywords", "keyword_file", type=click.Path())
@click.option("--k", default=10, show_default=True)
@click.option("--lns-mode", default="endpoints",
              type=click.Choice(metrics_mod.LNS_MODES), show_default=True)
@click.option("--model-name", default=None)
@click.option("--out", "out_stem", required=True, type=click.Path())
@click.pass_context
def metrics_cmd(ctx, manifest_path, keyword_file, k, lns_mode, model_name, out_stem):
    """Score a stored series and write report JSON + CSV."""
    je = ctx.obj["json_errors"]

    def go():
        manifest = store_mod.load_manifest(manifest_path)
        if len(manifest.years) < 2:
            raise DataError(f"need >= 2 years, manifest has {len(manifest.years)}")
        kws = (corpus_mod.load_keywords(keyword_file) if keyword_file
               else corpus_mod.load_default_keywords())
        matrices, _ = store_mod.load_series(manifest, kws)
        if not matrices:
            raise DataError("no keyword survives coverage gaps")
        rep = metrics_mod.report(matrices, kws, k=k, lns_mode=lns_mode,
                                 model_name=model_name or manifest.name)
        stem = Path(out_stem)
        stem.parent.mkdir(parents=True, exist_ok=True)
        stem.with_suffix(".json").write_text(rep.to_json(), encoding="utf-8")
        stem.with_suffix(".csv").write_text(rep.to_csv(), encoding="utf-8")
        click.echo(f"wrote {stem.with_suffix('.json')} and {stem.with_suffix('.csv')}")

    _guarded("metrics", je, go)


@main.command("synth")
@click.option("--out", "out_dir", required=True, type=click.Path())
@click.option("--years", required=True, help="Year range, e.g. 2019:2023.")
@click.option("--target-word", default="target", show_default=True)
@click.option("--drift/--no-drift", default=True, show_default=True,
              help="Ramp the sense mixture 0 to 1 across years, or hold it at 0.")
@click.option("--docs-per-year", default=500, show_default=True)
@click.option("--tokens-per-doc", default=400, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.pass_context
def synth_cmd(ctx, out_dir, years, target_word, drift, docs_per_year,
              tokens_per_doc, seed):
    """Generate a synthetic corpus with a known drift schedule."""
    je = ctx.obj["json_errors"]

    def go():
        first, last = _parse_span(years)
        yrs = list(range(first, last + 1))
        if drift and len(yrs) > 1:
            schedule = {y: i / (len(yrs) - 1) for i, y in enumerate(yrs)}
        else:
            schedule = {y: 0.0 for y in yrs}
        spec = synth_mod.DriftSpec(
            target_word=target_word,
            sense_a_contexts=tuple(f"senseA{i:02d}" for i in range(20)),
            sense_b_contexts=tuple(f"senseB{i:02d}" for i in range(20)),
            mixture_schedule=schedule, documents_per_year=docs_per_year,
            tokens_per_document=tokens_per_doc, seed=seed)
        slices = synth_mod.generate(spec, yrs)
        synth_mod.write_corpus(slices, out_dir)
        spec_path = Path(out_dir) / "drift_spec.json"
        spec_path.write_text(json.dumps({
            "target_word": spec.target_word,
            "mixture_schedule": {str(y): p for y, p in schedule.items()},
            "planted": synth_mod.expected_ranking(spec),
            "seed": seed,
        }, indent=2) + "\n", encoding="utf-8")
        click.echo(f"generated {len(yrs)} yearly files in {out_dir}")

    _guarded("synth", je, go)


@main.command("bullseye")
@click.option("--manifest", "manifest_path", required=True, type=click.Path())
@click.option("--word", required=True)
@click.option("--base-year", required=True, type=int)
@click.option("--out", "out_stem", required=True, type=click.Path())
@click.pass_context
def bullseye_cmd(ctx, manifest_path, word, base_year, out_stem):
    """Render the bullseye SVG/CSV for one word."""
    je = ctx.obj["json_errors"]

    def go():
        manifest = store_mod.load_manifest(manifest_path)
        matrices, _ = store_mod.load_series(manifest)
        for m in matrices:
            if word not in m.vocabulary:
                raise DataError(f"word {word!r} missing from year {m.year}")
        traj = metrics_mod.trajectory(word, matrices)
        frame = viz_mod.bullseye(traj, base_year)
        stem = Path(out_stem)
        stem.parent.mkdir(parents=True, exist_ok=True)
        viz_mod.render(frame, stem)
        click.echo(f"wrote {stem.with_suffix('.svg')} and {stem.with_suffix('.csv')}")

    _guarded("bullseye", je, go)


@main.command("validate-manifest")
@click.argument("manifest_path", type=click.Path())
@click.pass_context
def validate_manifest_cmd(ctx, manifest_path):
    """Check a series manifest and its matrix files."""
    je = ctx.obj["json_errors"]

    def go():
        manifest = store_mod.load_manifest(manifest_path)
        for y in manifest.years:
            m = store_mod.read_matrix(manifest.path_for(y), year=y,
                                      provenance=manifest.provenance)
            if m.dimension != manifest.dimension:
                raise DataError(
                    f"year {y}: dimension {m.dimension} != manifest "
                    f"{manifest.dimension}"
                )
        click.echo(f"manifest ok: {len(manifest.years)} years, "
                   f"dimension {manifest.dimension}")

    _guarded("validate-manifest", je, go)


def _parse_span(text: str) -> tuple[int, int]:
    try:
        first, last = (int(p) for p in text.split(":"))
    except ValueError as e:
        raise ConfigError(f"span must look like 2019:2023, got {text!r}") from e
    if first > last:
        raise ConfigError(f"span start {first} after end {last}")
    return first, last


if __name__ == "__main__":
    main()
