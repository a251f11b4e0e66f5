"""External report parsing tests.

The five .txt files under reports/ are transcriptions of real console
output from the compared analyzers, including their line wrapping; the
expectations here pin count, file, line, and normalized kind.
"""

from pathlib import Path

import pytest

from memlab.ingest import (
    FormatError,
    KIND_UNMAPPED,
    normalize_kind,
    parse_cppcheck_report,
    parse_infer_report,
    parse_memlab_report,
    parse_predator_report,
    parse_report,
)

REPORTS = Path("reports")


def _read(name):
    return (REPORTS / name).read_text(encoding="utf-8")


class TestReportFixtures:
    CASES = [
        ("infer_dead_store.txt", "infer",
         ("dead_store_false_positive_infer.c", 7, "DEAD_STORE")),
        ("infer_null_deref.txt", "infer",
         ("null_dereference_true_positive_mallocverification.c", 13,
          "NULL_DEREFERENCE")),
        ("cppcheck_struct_field_leak.txt", "cppcheck",
         ("memory_leak_true_positive_structwithpointer_infer.c", 19,
          "MEMORY_LEAK")),
        ("cppcheck_realloc_leak.txt", "cppcheck",
         ("memory_leak_true_positive_realloc_infer.c", 14, "MEMORY_LEAK")),
        ("predator_sizeof_leak.txt", "predator",
         ("memory_leak_false_negative_infer.c", 20, "MEMORY_LEAK")),
    ]

    @pytest.mark.parametrize("name,fmt,expected", CASES)
    def test_fixture_parses_to_single_finding(self, name, fmt, expected):
        findings = parse_report(_read(name), fmt)
        assert len(findings) == 1
        f = findings[0]
        assert (f.file, f.line, f.kind) == expected
        assert f.checker == f"ingest:{fmt}"

    def test_wrapped_lines_are_reassembled(self):
        f = parse_report(_read("cppcheck_realloc_leak.txt"), "cppcheck")[0]
        assert f.message == ("Common realloc mistake: 'new' nulled "
                             "but not freed upon failure")

    def test_predator_note_lines_are_dropped(self):
        findings = parse_report(_read("predator_sizeof_leak.txt"), "predator")
        assert len(findings) == 1  # the clEasyRun note is not a finding


class TestCrossFormatRejection:
    def test_infer_text_fed_to_predator(self):
        with pytest.raises(FormatError):
            parse_predator_report(_read("infer_dead_store.txt"))

    def test_cppcheck_text_fed_to_infer(self):
        with pytest.raises(FormatError):
            parse_infer_report(_read("cppcheck_realloc_leak.txt"))

    def test_predator_text_fed_to_cppcheck(self):
        with pytest.raises(FormatError):
            parse_cppcheck_report(_read("predator_sizeof_leak.txt"))

    def test_unknown_format_name(self):
        with pytest.raises(FormatError):
            parse_report("", "pvs-studio")


class TestInferFormat:
    def test_header_count_mismatch(self):
        text = "Found 2 issues\n\na.c:1: error: DEAD_STORE msg\n"
        with pytest.raises(FormatError):
            parse_infer_report(text)

    def test_summary_sum_must_match_header(self):
        text = ("Found 1 issue\n\na.c:1: error: DEAD_STORE msg\n\n"
                "Summary of the reports\n\n  DEAD_STORE: 3\n")
        with pytest.raises(FormatError):
            parse_infer_report(text)

    def test_empty_input_yields_no_findings(self):
        assert parse_infer_report("") == []

    def test_unknown_kind_becomes_unmapped(self):
        text = "Found 1 issue\n\na.c:1: error: PREMATURE_NIL msg\n"
        assert parse_infer_report(text)[0].kind == KIND_UNMAPPED


class TestCppcheckFormat:
    def test_non_error_severities_are_dropped(self):
        text = ("Checking a.c ...\n"
                "[a.c:4]: (style) Variable 'x' is assigned but never used\n"
                "[a.c:9]: (error) Memory leak: p\n")
        findings = parse_cppcheck_report(text)
        assert [(f.line, f.kind) for f in findings] == [(9, "MEMORY_LEAK")]

    def test_missing_severity_rejected(self):
        with pytest.raises(FormatError):
            parse_cppcheck_report("[a.c:4]: Memory leak: p\n")

    def test_stray_line_rejected(self):
        with pytest.raises(FormatError):
            parse_cppcheck_report("a.c:4: error: something\n")


class TestPredatorFormat:
    def test_unterminated_warning_rejected(self):
        with pytest.raises(FormatError):
            parse_predator_report("a.c:4:2: warning: memory leak detected\n")

    def test_invalid_free_phrase(self):
        text = "a.c:7:3: warning: invalid free() [-fplugin=libsl.so]\n"
        assert parse_predator_report(text)[0].kind == "INVALID_FREE"


class TestMemlabFormat:
    def test_missing_field_rejected(self):
        with pytest.raises(FormatError):
            parse_memlab_report('{"file": "a.c", "line": 1}\n')

    def test_invalid_json_rejected(self):
        with pytest.raises(FormatError):
            parse_memlab_report("not json\n")


class TestNormalizeKind:
    def test_canonical_tokens_pass_through(self):
        assert normalize_kind("MEMORY_LEAK") == "MEMORY_LEAK"
        assert normalize_kind("OUT_OF_BOUNDS") == "OUT_OF_BOUNDS"

    def test_phrases_map_case_insensitively(self):
        assert normalize_kind("Null Dereference") == "NULL_DEREFERENCE"
        assert normalize_kind("dead store") == "DEAD_STORE"
        assert normalize_kind("Dangling Pointer") == "DANGLING_POINTER"

    def test_unknown_becomes_unmapped(self):
        assert normalize_kind("quantum entanglement") == KIND_UNMAPPED
