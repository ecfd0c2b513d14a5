import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from semdrift.cli import (PipelineConfig, SeriesSpec, _parse_span,
                          config_from_dict, load_config, main)
from semdrift.errors import ConfigError

FIXTURES = Path(__file__).parent / "fixtures" / "contextual"

KEYWORDS = {"stable": ["bg00_00", "bg00_01", "bg01_00"], "mover": ["target"]}


def invoke(*args):
    return CliRunner().invoke(main, [str(a) for a in args])


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """synth -> train -> align chain shared by the command tests."""
    root = tmp_path_factory.mktemp("cli")
    (root / "kw.json").write_text(json.dumps(KEYWORDS))
    r = invoke("synth", "--out", root / "corpus", "--years", "2020:2022",
               "--docs-per-year", 40, "--tokens-per-doc", 150, "--seed", 3)
    assert r.exit_code == 0, r.output
    r = invoke("train", "--corpus", root / "corpus", "--span", "2020:2022",
               "--out", root / "trained", "--dimension", 16, "--epochs", 2)
    assert r.exit_code == 0, r.output
    r = invoke("align", "--manifest", root / "trained" / "manifest.json",
               "--base-year", 2020, "--out", root / "aligned")
    assert r.exit_code == 0, r.output
    return root


class TestCommandChain:
    def test_synth_writes_year_files_and_spec(self, workspace):
        corpus = workspace / "corpus"
        assert all((corpus / f"{y}.txt").is_file() for y in (2020, 2021, 2022))
        spec = json.loads((corpus / "drift_spec.json").read_text())
        assert spec["planted"] == ["target"]

    def test_train_writes_manifest_and_matrices(self, workspace):
        trained = workspace / "trained"
        manifest = json.loads((trained / "manifest.json").read_text())
        assert manifest["provenance"] == "static_trained"
        assert manifest["dimension"] == 16
        assert all((trained / f"{y}.vec").is_file() for y in (2020, 2021, 2022))

    def test_align_records_residuals(self, workspace):
        manifest = json.loads((workspace / "aligned" / "manifest.json").read_text())
        assert manifest["standardized"] is True
        assert set(manifest["residuals"]) == {"2020", "2021", "2022"}
        assert manifest["residuals"]["2020"] == 0.0  # base maps to itself

    def test_validate_manifest_ok(self, workspace):
        r = invoke("validate-manifest", workspace / "aligned" / "manifest.json")
        assert r.exit_code == 0
        assert "manifest ok" in r.output

    def test_metrics_writes_report(self, workspace):
        stem = workspace / "reports" / "m"
        r = invoke("metrics", "--manifest", workspace / "aligned" / "manifest.json",
                   "--keywords", workspace / "kw.json", "--k", 3, "--out", stem)
        assert r.exit_code == 0, r.output
        rep = json.loads(stem.with_suffix(".json").read_text())
        assert set(rep["per_word"]) == {"bg00_00", "bg00_01", "bg01_00", "target"}
        assert rep["span_years"] == 3
        header = stem.with_suffix(".csv").read_text().splitlines()[0]
        assert header == "time_span,model,sd,mts,rsc,lns"

    def test_bullseye_writes_svg_and_csv(self, workspace):
        stem = workspace / "plots" / "target"
        r = invoke("bullseye", "--manifest", workspace / "aligned" / "manifest.json",
                   "--word", "target", "--base-year", 2020, "--out", stem)
        assert r.exit_code == 0, r.output
        assert stem.with_suffix(".svg").is_file()
        csv_lines = stem.with_suffix(".csv").read_text().splitlines()
        assert csv_lines[0] == "year,radius,angle"
        assert len(csv_lines) == 4


class TestErrorHandling:
    def test_missing_config_exits_2(self, tmp_path):
        r = invoke("run", tmp_path / "nope.toml")
        assert r.exit_code == 2

    def test_base_year_outside_span_exits_2(self, tmp_path):
        cfg = tmp_path / "bad.toml"
        cfg.write_text(
            'corpus_path = "c"\nspan = [2020, 2022]\nbase_year = 2019\n'
            'output_dir = "o"\n[[series]]\nname = "x"\nkind = "train"\n')
        r = invoke("run", cfg)
        assert r.exit_code == 2
        assert "base_year" in r.stderr

    def test_json_errors_flag(self, tmp_path):
        r = invoke("--json-errors", "run", tmp_path / "nope.toml")
        assert r.exit_code == 2
        err = json.loads(r.stderr)
        assert err["stage"] == "config"
        assert err["error"] == "ConfigError"

    def test_missing_corpus_year_exits_3(self, tmp_path):
        r = invoke("train", "--corpus", tmp_path, "--span", "2020:2021",
                   "--out", tmp_path / "t")
        assert r.exit_code == 3
        assert "missing slice" in r.stderr

    def test_malformed_span_exits_2(self, tmp_path):
        r = invoke("train", "--corpus", tmp_path, "--span", "2020-2021",
                   "--out", tmp_path / "t")
        assert r.exit_code == 2

    def test_one_year_manifest_exits_3(self, tmp_path, workspace):
        src = workspace / "trained"
        one = {"name": "one", "provenance": "static_trained", "dimension": 16,
               "years": [2020], "files": {"2020": str(src / "2020.vec")}}
        p = tmp_path / "manifest.json"
        p.write_text(json.dumps(one))
        r = invoke("metrics", "--manifest", p, "--out", tmp_path / "m")
        assert r.exit_code == 3
        assert ">= 2 years" in r.stderr

    def test_bullseye_unknown_word_exits_3(self, workspace, tmp_path):
        r = invoke("bullseye", "--manifest", workspace / "aligned" / "manifest.json",
                   "--word", "nope", "--base-year", 2020, "--out", tmp_path / "b")
        assert r.exit_code == 3


class TestConfigParsing:
    def test_parse_span(self):
        assert _parse_span("2019:2023") == (2019, 2023)
        with pytest.raises(ConfigError):
            _parse_span("2023:2019")

    def test_toml_and_json_equivalent(self, tmp_path):
        toml = tmp_path / "c.toml"
        toml.write_text(
            'corpus_path = "c"\nspan = [2020, 2024]\nbase_year = 2020\n'
            'output_dir = "o"\nk = 7\n[[series]]\nname = "x"\nkind = "train"\n')
        js = tmp_path / "c.json"
        js.write_text(json.dumps({
            "corpus_path": "c", "span": [2020, 2024], "base_year": 2020,
            "output_dir": "o", "k": 7,
            "series": [{"name": "x", "kind": "train"}]}))
        assert load_config(toml) == load_config(js)

    def test_default_spans_filtered_to_fit(self):
        cfg = config_from_dict({
            "corpus_path": "c", "span": [2020, 2024], "base_year": 2020,
            "output_dir": "o", "series": [{"name": "x", "kind": "train"}]})
        assert cfg.effective_spans() == (3, 5)

    def test_short_series_falls_back_to_total(self):
        cfg = PipelineConfig(corpus_path="c", span=(2020, 2021), base_year=2020,
                             output_dir="o",
                             series=(SeriesSpec(name="x", kind="train"),))
        assert cfg.effective_spans() == (2,)

    def test_ingest_without_manifest_rejected(self):
        with pytest.raises(ConfigError, match="manifest_path"):
            config_from_dict({
                "corpus_path": "c", "span": [2020, 2022], "base_year": 2020,
                "output_dir": "o", "series": [{"name": "x", "kind": "ingest"}]})

    def test_explain_config_prints_effective_values(self, tmp_path):
        cfg = tmp_path / "c.toml"
        cfg.write_text(
            'corpus_path = "c"\nspan = [2020, 2022]\nbase_year = 2020\n'
            'output_dir = "o"\n[[series]]\nname = "x"\nkind = "train"\n')
        r = invoke("run", cfg, "--explain-config")
        assert r.exit_code == 0
        effective = json.loads(r.output)
        assert effective["spans"] == [3]
        assert effective["sgns"]["dimension"] == 100


def pipeline_config(workspace, out_dir, extra=None):
    data = {
        "corpus_path": str(workspace / "corpus"),
        "span": [2020, 2022], "base_year": 2020,
        "output_dir": str(out_dir),
        "keyword_file": str(workspace / "kw.json"),
        "sgns": {"dimension": 16, "epochs": 2},
        "bootstrap": {"resamples": 200},
        "series": [{"name": "w2v", "kind": "train"}],
        "bullseye_words": ["target"],
    }
    data.update(extra or {})
    return data


class TestRunPipeline:
    def test_full_run_artifacts(self, workspace, tmp_path):
        out = tmp_path / "out"
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps(pipeline_config(workspace, out)))
        r = invoke("run", cfg)
        assert r.exit_code == 0, r.output
        assert (out / "report_w2v_3.json").is_file()
        assert (out / "report_w2v_3.csv").is_file()
        assert (out / "comparison.csv").is_file()
        assert (out / "bullseye_w2v_target.svg").is_file()
        manifest = json.loads((out / "run_manifest.json").read_text())
        assert "2021" in manifest["alignment_residuals"]["w2v"]
        assert "report_w2v_3.json" in manifest["reports"]

    def test_run_reproducible(self, workspace, tmp_path):
        outputs = []
        for name in ("r1", "r2"):
            out = tmp_path / name
            cfg = tmp_path / f"{name}.json"
            cfg.write_text(json.dumps(pipeline_config(workspace, out)))
            assert invoke("run", cfg).exit_code == 0
            outputs.append((out / "comparison.csv").read_bytes())
        assert outputs[0] == outputs[1]

    def test_ingest_series_from_occurrence_fixture(self, tmp_path):
        out = tmp_path / "out"
        data = {
            "corpus_path": "unused",
            "span": [2020, 2022], "base_year": 2020,
            "output_dir": str(out),
            "keyword_file": str(FIXTURES / "keywords.json"),
            "k": 2,
            "series": [{"name": "ctx", "kind": "ingest",
                        "manifest_path": str(FIXTURES / "manifest.json")}],
        }
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps(data))
        r = invoke("run", cfg)
        assert r.exit_code == 0, r.output
        rep = json.loads((out / "report_ctx_3.json").read_text())
        assert rep["lns_universe"] == "keyword_set"
        assert set(rep["per_word"]) == {"alpha", "beta", "gamma"}

    def test_failed_run_leaves_no_partial_output(self, workspace, tmp_path):
        out = tmp_path / "out"
        # keywords absent from the corpus: metrics stage fails after training
        bad_kw = tmp_path / "kw.json"
        bad_kw.write_text(json.dumps({"x": ["notaword"]}))
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps(pipeline_config(
            workspace, out, {"keyword_file": str(bad_kw)})))
        r = invoke("run", cfg)
        assert r.exit_code == 3
        assert not list(out.glob("report_*"))
        assert not (out / "comparison.csv").exists()
