"""Command-line interface tests."""

import json

import pytest

from memlab.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestAnalyze:
    def test_findings_exit_one_with_golden_output(self, capsys):
        code, out, _ = run_cli(capsys, "analyze", "corpus/dead_store_tp.c",
                               "--profile", "union")
        assert code == 1
        assert out == (
            "Found 1 issue\n"
            "\n"
            "corpus/dead_store_tp.c:8: error: DEAD_STORE\n"
            "  The value written to &ptr_a is never used\n"
            "\n"
            "Summary of the reports\n"
            "\n"
            "  DEAD_STORE: 1\n")

    def test_clean_file_exits_zero(self, capsys):
        code, out, _ = run_cli(capsys, "analyze",
                               "corpus/dead_store_tp_fixed.c")
        assert code == 0
        assert out == "Found 0 issues\n"

    def test_missing_file_exits_two(self, capsys):
        code, _, err = run_cli(capsys, "analyze", "missing.c")
        assert code == 2
        assert "error" in err

    def test_parse_error_exits_two(self, capsys, tmp_path):
        bad = tmp_path / "bad.c"
        bad.write_text("int main() { for (;;) {} }")
        code, _, err = run_cli(capsys, "analyze", str(bad))
        assert code == 2
        assert "for" in err

    def test_structured_output_is_jsonl(self, capsys):
        code, out, _ = run_cli(capsys, "analyze", "corpus/explicit_leak.c",
                               "--format", "structured")
        assert code == 1
        records = [json.loads(line) for line in out.splitlines()]
        assert records[0]["kind"] == "MEMORY_LEAK"
        assert records[0]["line"] == 12

    def test_unknown_profile_exits_two(self, capsys):
        code, _, _ = run_cli(capsys, "analyze", "corpus/explicit_leak.c",
                             "--profile", "pvs-like")
        assert code == 2

    def test_unknown_checker_exits_two(self, capsys):
        code, _, err = run_cli(capsys, "analyze", "corpus/explicit_leak.c",
                               "--disable", "IMAGINARY")
        assert code == 2
        assert "IMAGINARY" in err

    def test_disable_flag_silences_checker(self, capsys):
        code, out, _ = run_cli(capsys, "analyze", "corpus/dead_store_tp.c",
                               "--disable",
                               "DEAD_STORE,DEAD_STORE_NULL_INIT")
        assert code == 0
        assert out == "Found 0 issues\n"

    def test_env_profile_default(self, capsys, monkeypatch):
        monkeypatch.setenv("MEMLAB_PROFILE", "predator-like")
        code, out, _ = run_cli(capsys, "analyze", "corpus/dead_store_tp.c")
        assert code == 0  # predator-like has no dead-store checker

    def test_flag_overrides_config_file(self, capsys, tmp_path):
        cfg = tmp_path / "memlab.conf"
        cfg.write_text("profile = predator-like\n"
                       "# comments are allowed\n")
        code, _, _ = run_cli(capsys, "analyze", "corpus/dead_store_tp.c",
                             "--config", str(cfg))
        assert code == 0
        code, _, _ = run_cli(capsys, "analyze", "corpus/dead_store_tp.c",
                             "--config", str(cfg), "--profile", "union")
        assert code == 1

    def test_config_file_overrides_profile_defaults(self, capsys, tmp_path):
        cfg = tmp_path / "memlab.conf"
        cfg.write_text("profile = union\n"
                       "disable = DEAD_STORE, DEAD_STORE_NULL_INIT\n")
        code, out, _ = run_cli(capsys, "analyze", "corpus/dead_store_tp.c",
                               "--config", str(cfg))
        assert code == 0

    def test_malformed_config_exits_two(self, capsys, tmp_path):
        cfg = tmp_path / "memlab.conf"
        cfg.write_text("just some words\n")
        code, _, _ = run_cli(capsys, "analyze", "corpus/explicit_leak.c",
                             "--config", str(cfg))
        assert code == 2

    def test_jobs_do_not_change_output(self, capsys):
        paths = ["corpus/explicit_leak.c", "corpus/dead_store_tp.c",
                 "corpus/realloc_leak.c"]
        _, serial, _ = run_cli(capsys, "analyze", *paths)
        _, threaded, _ = run_cli(capsys, "analyze", *paths, "--jobs", "4")
        assert serial == threaded

    def test_timings_go_to_stderr_only(self, capsys):
        _, out1, err = run_cli(capsys, "analyze", "corpus/explicit_leak.c",
                               "--timings")
        assert "elapsed:" in err and "elapsed:" not in out1
        _, out2, _ = run_cli(capsys, "analyze", "corpus/explicit_leak.c")
        assert out1 == out2


class TestBench:
    def test_corpus_all_pass_exits_zero(self, capsys):
        code, out, _ = run_cli(capsys, "bench", "--corpus",
                               "corpus/manifest.jsonl", "--profile", "union")
        assert code == 0
        assert "pattern 11: detected" in out

    def test_truth_classification(self, capsys, tmp_path):
        report = tmp_path / "tool.jsonl"
        report.write_text(json.dumps({
            "file": "sds.c", "line": 159, "kind": "MEMORY_LEAK",
            "checker": "ingest:memlab", "message": "", "function": "",
        }) + "\n")
        code, out, _ = run_cli(capsys, "bench", "--truth", "truth/sds.jsonl",
                               "--ingested", str(report), "--format",
                               "memlab")
        assert code == 0
        assert "tp=1 fp=0" in out

    def test_corpus_and_truth_together_is_usage_error(self, capsys):
        code, _, _ = run_cli(capsys, "bench", "--corpus",
                             "corpus/manifest.jsonl", "--truth",
                             "truth/sds.jsonl")
        assert code == 2


class TestIngest:
    def test_conversion_exits_zero_even_with_findings(self, capsys):
        code, out, _ = run_cli(capsys, "ingest",
                               "reports/infer_null_deref.txt",
                               "--format", "infer")
        assert code == 0
        record = json.loads(out.splitlines()[0])
        assert record["kind"] == "NULL_DEREFERENCE"
        assert record["line"] == 13

    def test_empty_report_exits_zero(self, capsys, tmp_path):
        empty = tmp_path / "empty.txt"
        empty.write_text("")
        code, out, _ = run_cli(capsys, "ingest", str(empty),
                               "--format", "infer")
        assert code == 0
        assert out == ""

    def test_format_mismatch_exits_two(self, capsys):
        code, _, err = run_cli(capsys, "ingest",
                               "reports/infer_null_deref.txt",
                               "--format", "predator")
        assert code == 2
        assert "line 1" in err


class TestPersistence:
    def test_two_dates(self, capsys):
        code, out, _ = run_cli(capsys, "persistence", "2009-10-14",
                               "2009-10-18")
        assert code == 0
        assert out.strip() == "0.13"

    def test_day_month_year_format(self, capsys):
        code, out, _ = run_cli(capsys, "persistence", "06/02/2014",
                               "25/11/2014")
        assert code == 0
        assert out.strip() == "9"

    def test_truth_manifest_listing(self, capsys):
        code, out, _ = run_cli(capsys, "persistence", "--truth",
                               "truth/beanstalkd.jsonl")
        assert code == 0
        assert "binlog.c:215 NULL_DEREFERENCE: 0.13" in out
        assert "net.c:28 DEAD_STORE: 22" in out

    def test_reversed_dates_exit_two(self, capsys):
        code, _, _ = run_cli(capsys, "persistence", "2020-02-01",
                             "2020-01-01")
        assert code == 2


class TestDeterminism:
    def test_two_runs_byte_identical(self, capsys):
        args = ("analyze", "corpus/struct_field_leak.c",
                "corpus/unchecked_malloc_deref.c")
        _, first, _ = run_cli(capsys, *args)
        _, second, _ = run_cli(capsys, *args)
        assert first == second
