import json

import pytest
from click.testing import CliRunner

from bibliocheck.cli import main

from conftest import cits_csv, meta_csv
from sparql_mock import MockSparqlEndpoint, expression_store
from test_orchestrator import CLEAN_ROW


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def registry_env(registry_server, monkeypatch):
    monkeypatch.setenv("BIBLIOCHECK_ENDPOINT_DOI", registry_server + "/doi/{value}")
    monkeypatch.setenv("BIBLIOCHECK_ENDPOINT_ORCID", registry_server + "/orcid/{value}")
    monkeypatch.setenv("BIBLIOCHECK_ENDPOINT_PMID", registry_server + "/pmid/{value}")
    return registry_server


def write_meta(tmp_path, rows, name="meta.csv"):
    path = tmp_path / name
    path.write_bytes(meta_csv(rows))
    return str(path)


def write_cits(tmp_path, rows, name="cits.csv"):
    path = tmp_path / name
    path.write_bytes(cits_csv(rows))
    return str(path)


class TestValidateCommand:
    def test_clean_file_exit_zero_three_outputs(self, runner, tmp_path, registry_env):
        input_path = write_meta(tmp_path, [CLEAN_ROW])
        out_dir = tmp_path / "out"
        result = runner.invoke(main, ["validate", "--input", input_path,
                                      "--out-dir", str(out_dir)])
        assert result.exit_code == 0, result.output
        for name in ("validation_report.json", "validation_summary.txt",
                     "validation_report.html"):
            assert (out_dir / name).exists()

    def test_duplicate_br_exit_one_and_shape(self, runner, tmp_path):
        rows = [dict(CLEAN_ROW), dict(CLEAN_ROW)]
        input_path = write_meta(tmp_path, rows)
        out_dir = tmp_path / "out"
        result = runner.invoke(main, ["validate", "--input", input_path,
                                      "--out-dir", str(out_dir), "--offline"])
        assert result.exit_code == 1
        payload = json.loads((out_dir / "validation_report.json").read_text())
        assert len(payload) == 1
        assert payload[0]["error_label"] == "duplicate_br"
        assert list(payload[0].keys()) == [
            "validation_level", "error_type", "error_label", "valid", "message",
            "position",
        ]

    def test_warnings_only_strict_flag(self, runner, tmp_path):
        rows = [dict(CLEAN_ROW, title="ALL CAPS TITLE")]
        input_path = write_meta(tmp_path, rows)
        relaxed = runner.invoke(main, ["validate", "--input", input_path,
                                       "--out-dir", str(tmp_path / "a"), "--offline"])
        assert relaxed.exit_code == 0
        strict = runner.invoke(main, ["validate", "--input", input_path,
                                      "--out-dir", str(tmp_path / "b"), "--offline",
                                      "--strict-warnings"])
        assert strict.exit_code == 1

    def test_missing_input_exit_two(self, runner, tmp_path):
        result = runner.invoke(main, ["validate", "--input", str(tmp_path / "nope.csv"),
                                      "--out-dir", str(tmp_path / "out")])
        assert result.exit_code == 2

    def test_malformed_csv_exit_two(self, runner, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_bytes(meta_csv([]).rstrip(b"\n") + b"\nonly,two\n")
        result = runner.invoke(main, ["validate", "--input", str(path),
                                      "--out-dir", str(tmp_path / "out")])
        assert result.exit_code == 2

    def test_type_mismatch_exit_two(self, runner, tmp_path):
        input_path = write_meta(tmp_path, [CLEAN_ROW])
        result = runner.invoke(main, ["validate", "--input", input_path,
                                      "--out-dir", str(tmp_path / "out"),
                                      "--type", "cits", "--offline"])
        assert result.exit_code == 2

    def test_no_html_flag(self, runner, tmp_path):
        input_path = write_meta(tmp_path, [CLEAN_ROW])
        out_dir = tmp_path / "out"
        result = runner.invoke(main, ["validate", "--input", input_path,
                                      "--out-dir", str(out_dir), "--offline",
                                      "--no-html"])
        assert result.exit_code == 0
        assert not (out_dir / "validation_report.html").exists()
        assert (out_dir / "validation_report.json").exists()

    def test_existence_warning_via_registry_endpoint(self, runner, tmp_path,
                                                     registry_env):
        rows = [dict(CLEAN_ROW, id="doi:10.1234/missing-thing")]
        input_path = write_meta(tmp_path, rows)
        out_dir = tmp_path / "out"
        result = runner.invoke(main, ["validate", "--input", input_path,
                                      "--out-dir", str(out_dir)])
        assert result.exit_code == 0
        payload = json.loads((out_dir / "validation_report.json").read_text())
        assert [e["error_label"] for e in payload] == ["br_id_existence"]

    def test_offline_suppresses_existence(self, runner, tmp_path):
        rows = [dict(CLEAN_ROW, id="doi:10.1234/missing-thing")]
        input_path = write_meta(tmp_path, rows)
        out_dir = tmp_path / "out"
        result = runner.invoke(main, ["validate", "--input", input_path,
                                      "--out-dir", str(out_dir), "--offline"])
        assert result.exit_code == 0
        assert json.loads((out_dir / "validation_report.json").read_text()) == []

    def test_deterministic_outputs(self, runner, tmp_path):
        rows = [dict(CLEAN_ROW, page="9-2"), dict(CLEAN_ROW, id="doi:10.1234/b",
                                                  title="CAPS TITLE", type="mixtape")]
        input_path = write_meta(tmp_path, rows)
        outputs = []
        for run_dir in ("one", "two"):
            out_dir = tmp_path / run_dir
            result = runner.invoke(main, ["validate", "--input", input_path,
                                          "--out-dir", str(out_dir), "--offline"])
            assert result.exit_code == 1
            outputs.append({
                name: (out_dir / name).read_bytes()
                for name in ("validation_report.json", "validation_summary.txt",
                             "validation_report.html")
            })
        assert outputs[0] == outputs[1]

    def test_rule_config_file(self, runner, tmp_path):
        config_path = tmp_path / "rules.json"
        config_path.write_text(json.dumps(
            {"type_vocabulary": ["journal article", "mixtape"]}))
        input_path = write_meta(tmp_path, [dict(CLEAN_ROW, type="mixtape")])
        without = runner.invoke(main, ["validate", "--input", input_path,
                                       "--out-dir", str(tmp_path / "a"), "--offline"])
        assert without.exit_code == 1
        with_config = runner.invoke(main, ["validate", "--input", input_path,
                                           "--out-dir", str(tmp_path / "b"),
                                           "--offline", "--config", str(config_path)])
        assert with_config.exit_code == 0, with_config.output

    def test_summary_line_printed(self, runner, tmp_path):
        input_path = write_meta(tmp_path, [dict(CLEAN_ROW, page="15")])
        result = runner.invoke(main, ["validate", "--input", input_path,
                                      "--out-dir", str(tmp_path / "out"), "--offline"])
        assert "1 error(s), 0 warning(s)" in result.output


class TestValidatePairCommand:
    def test_matched_pair(self, runner, tmp_path):
        meta_path = write_meta(tmp_path, [dict(CLEAN_ROW, id="doi:10.1234/a"),
                                          dict(CLEAN_ROW, id="doi:10.1234/b")])
        cits_path = write_cits(tmp_path, [
            {"citing_id": "doi:10.1234/a", "citing_publication_date": "2023-03-13",
             "cited_id": "doi:10.1234/b", "cited_publication_date": "2023"}])
        out_dir = tmp_path / "out"
        result = runner.invoke(main, ["validate-pair", "--meta", meta_path,
                                      "--cits", cits_path, "--out-dir", str(out_dir),
                                      "--offline"])
        assert result.exit_code == 0, result.output
        for name in ("meta_report.json", "cits_report.json", "cross_report.json",
                     "meta_report.html", "cits_report.html", "cross_summary.txt"):
            assert (out_dir / name).exists()

    def test_dangling_cited_id_warning(self, runner, tmp_path):
        meta_path = write_meta(tmp_path, [dict(CLEAN_ROW, id="doi:10.1234/a")])
        cits_path = write_cits(tmp_path, [
            {"citing_id": "doi:10.1234/a", "cited_id": "doi:10.1234/nowhere"}])
        out_dir = tmp_path / "out"
        result = runner.invoke(main, ["validate-pair", "--meta", meta_path,
                                      "--cits", cits_path, "--out-dir", str(out_dir),
                                      "--offline"])
        assert result.exit_code == 0
        cross = json.loads((out_dir / "cross_report.json").read_text())
        assert [e["error_label"] for e in cross] == ["unmatched_citation_id"]

        strict = runner.invoke(main, ["validate-pair", "--meta", meta_path,
                                      "--cits", cits_path,
                                      "--out-dir", str(tmp_path / "out2"),
                                      "--offline", "--strict-warnings"])
        assert strict.exit_code == 1

    def test_malformed_meta_no_cross_phase(self, runner, tmp_path):
        meta_path = tmp_path / "broken.csv"
        meta_path.write_bytes(meta_csv([]).rstrip(b"\n") + b"\nonly,two\n")
        cits_path = write_cits(tmp_path, [])
        out_dir = tmp_path / "out"
        result = runner.invoke(main, ["validate-pair", "--meta", str(meta_path),
                                      "--cits", cits_path, "--out-dir", str(out_dir),
                                      "--offline"])
        assert result.exit_code == 2
        assert not (out_dir / "cross_report.json").exists()

    def test_swapped_documents_exit_two(self, runner, tmp_path):
        meta_path = write_meta(tmp_path, [CLEAN_ROW])
        cits_path = write_cits(tmp_path, [])
        result = runner.invoke(main, ["validate-pair", "--meta", cits_path,
                                      "--cits", meta_path,
                                      "--out-dir", str(tmp_path / "out"), "--offline"])
        assert result.exit_code == 2


class TestMonitorCommand:
    def _config_file(self, tmp_path, endpoint_url, query_suffix=""):
        from test_monitor import duplicate_br_specs
        ask_query, count_query = duplicate_br_specs()
        payload = {
            "endpoint_url": endpoint_url,
            "collection": "meta",
            "tests": [
                {"label": "duplicate_br", "description": "d",
                 "query": ask_query + query_suffix, "mode": "ask"},
                {"label": "duplicate_br_count", "description": "d",
                 "query": count_query + query_suffix, "mode": "count"},
            ],
        }
        path = tmp_path / "monitor.json"
        path.write_text(json.dumps(payload))
        return str(path)

    def test_clean_store_exit_zero(self, runner, tmp_path):
        with MockSparqlEndpoint(expression_store(shared_doi=False)) as endpoint:
            config_path = self._config_file(tmp_path, endpoint.url)
            out_dir = tmp_path / "out"
            result = runner.invoke(main, ["monitor", "--config", config_path,
                                          "--out-dir", str(out_dir)])
        assert result.exit_code == 0, result.output
        assert (out_dir / "monitor_report.json").exists()
        assert (out_dir / "monitor_report.html").exists()

    def test_seeded_duplicate_exit_one(self, runner, tmp_path):
        with MockSparqlEndpoint(expression_store(shared_doi=True)) as endpoint:
            config_path = self._config_file(tmp_path, endpoint.url)
            result = runner.invoke(main, ["monitor", "--config", config_path,
                                          "--out-dir", str(tmp_path / "out")])
        assert result.exit_code == 1

    def test_count_flag_includes_count_tests(self, runner, tmp_path):
        with MockSparqlEndpoint(expression_store(shared_doi=True)) as endpoint:
            config_path = self._config_file(tmp_path, endpoint.url)
            out_dir = tmp_path / "out"
            result = runner.invoke(main, ["monitor", "--config", config_path,
                                          "--out-dir", str(out_dir), "--count"])
        payload = json.loads((out_dir / "monitor_report.json").read_text())
        assert [r["label"] for r in payload["results"]] == [
            "duplicate_br", "duplicate_br_count"]
        assert payload["results"][1]["count"] == 2
        assert result.exit_code == 1

    def test_unreachable_endpoint_indeterminate_exit_zero(self, runner, tmp_path):
        config_path = self._config_file(tmp_path, "http://127.0.0.1:1/sparql")
        result = runner.invoke(main, ["monitor", "--config", config_path,
                                      "--out-dir", str(tmp_path / "out")])
        assert result.exit_code == 0
        assert "outcome is unknown" in result.output

    def test_config_error_exit_two(self, runner, tmp_path):
        path = tmp_path / "monitor.json"
        path.write_text(json.dumps({"tests": []}))
        result = runner.invoke(main, ["monitor", "--config", str(path),
                                      "--out-dir", str(tmp_path / "out")])
        assert result.exit_code == 2


class TestRenderCommand:
    def test_render_matches_original(self, runner, tmp_path):
        input_path = write_meta(tmp_path, [dict(CLEAN_ROW, page="15")])
        out_dir = tmp_path / "out"
        first = runner.invoke(main, ["validate", "--input", input_path,
                                     "--out-dir", str(out_dir), "--offline"])
        assert first.exit_code == 1
        rendered = tmp_path / "rerendered.html"
        result = runner.invoke(main, ["render",
                                      "--report", str(out_dir / "validation_report.json"),
                                      "--source", input_path,
                                      "--out", str(rendered)])
        assert result.exit_code == 0
        assert rendered.read_bytes() == (out_dir / "validation_report.html").read_bytes()

    def test_report_source_mismatch_exit_two(self, runner, tmp_path):
        long_input = write_meta(tmp_path, [dict(CLEAN_ROW, page="15"),
                                           dict(CLEAN_ROW, id="doi:10.1234/b",
                                                page="15")])
        out_dir = tmp_path / "out"
        runner.invoke(main, ["validate", "--input", long_input,
                             "--out-dir", str(out_dir), "--offline"])
        short_input = write_meta(tmp_path, [dict(CLEAN_ROW, page="15")], "short.csv")
        result = runner.invoke(main, ["render",
                                      "--report", str(out_dir / "validation_report.json"),
                                      "--source", short_input,
                                      "--out", str(tmp_path / "x.html")])
        assert result.exit_code == 2

    def test_empty_report_renders_no_errors_page(self, runner, tmp_path):
        input_path = write_meta(tmp_path, [CLEAN_ROW])
        report_path = tmp_path / "empty.json"
        report_path.write_text("[]")
        out_path = tmp_path / "page.html"
        result = runner.invoke(main, ["render", "--report", str(report_path),
                                      "--source", input_path, "--out", str(out_path)])
        assert result.exit_code == 0
        assert "No errors detected." in out_path.read_text()
