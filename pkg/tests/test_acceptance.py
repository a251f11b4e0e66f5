"""Acceptance suite: one test and one printed PASS/FAIL line per criterion."""

import glob
import random
import time

import pytest

from memlab.analysis import PROFILES, analyze_unit
from memlab.benchlab import (
    classify_program_size,
    compute_persistence,
    load_corpus_manifest,
    load_truth_manifest,
    reproduce_tool_table,
    run_corpus,
)
from memlab.frontend import parse_file
from memlab.ingest import parse_report

from test_properties import analyzer_leak_lines, generate_program

CORPUS_MANIFEST = "corpus/manifest.jsonl"

# The five fixtures whose diagnostics mirror published analyzer reports.
GOLDEN = {
    "corpus/dead_store_null_init.c": (7, "DEAD_STORE",
                                      "The value written to &ptr_a"),
    "corpus/struct_field_leak.c": (19, "MEMORY_LEAK",
                                   "Memory leak: new.value"),
    "corpus/realloc_leak.c": (14, "MEMORY_LEAK", "Common realloc mistake"),
    "corpus/unchecked_malloc_deref.c": (
        13, "NULL_DEREFERENCE", "could be null and is dereferenced"),
    "corpus/sizeof_ptr_leak.c": (20, "MEMORY_LEAK", "is not reachable"),
}


@pytest.fixture
def announce(request, capfd):
    outcome = {"failed": False}
    yield outcome
    label = request.node.name.replace("test_", "", 1)
    status = "FAIL" if outcome["failed"] else "PASS"
    with capfd.disabled():
        print(f"[acceptance] {label}: {status}")


def check(announce, condition, detail=""):
    if not condition:
        announce["failed"] = True
        assert condition, detail


def test_1_corpus_golden_suite(announce):
    started = time.perf_counter()
    for path, (line, kind, fragment) in GOLDEN.items():
        result = analyze_unit(parse_file(path))
        check(announce, [(f.line, f.kind) for f in result] == [(line, kind)],
              f"{path}: {[(f.line, f.kind) for f in result]}")
        check(announce, fragment in result[0].message, result[0].message)
    reduced = PROFILES["union"].with_checkers(
        disable={"DEAD_STORE_NULL_INIT", "INTERIOR_FREE"})
    for fixed in sorted(glob.glob("corpus/*_fixed.c")):
        result = analyze_unit(parse_file(fixed), config=reduced)
        check(announce, len(result) == 0,
              f"{fixed}: {[(f.line, f.kind) for f in result]}")
    check(announce, time.perf_counter() - started < 2.0, "too slow")


def test_2_pattern_matrix(announce):
    manifest = load_corpus_manifest(CORPUS_MANIFEST)
    for profile in PROFILES:
        report = run_corpus(manifest, profile)
        check(announce, report.all_passed,
              f"{profile}: " + "; ".join(
                  f"{r.fixture} {r.detail}" for r in report.results
                  if not r.passed))
        for fx in manifest.fixtures:
            check(announce,
                  report.pattern_matrix[fx.pattern] == fx.profiles[profile],
                  f"{profile} pattern {fx.pattern}")


def test_3_classification_reproduction(announce):
    sds = reproduce_tool_table(load_truth_manifest("truth/sds.jsonl"))
    beanstalkd = reproduce_tool_table(
        load_truth_manifest("truth/beanstalkd.jsonl"))
    expected_sds = {
        ("infer", "NULL_DEREFERENCE"): {"fp": 0, "tp": 4},
        ("predator", "MEMORY_LEAK"): {"fp": 3, "tp": 0},
        ("clang", "INVALID_FREE"): {"fp": 2, "tp": 0},
        ("clang", "NULL_DEREFERENCE"): {"fp": 0, "tp": 2},
        ("cppcheck", "MEMORY_LEAK"): {"fp": 0, "tp": 1},
        ("infer", "DEAD_STORE"): {"fp": 1, "tp": 1},
        ("predator", "INVALID_DEREFERENCE"): {"fp": 4, "tp": 0},
        ("predator", "OUT_OF_BOUNDS"): {"fp": 4, "tp": 0},
        ("predator", "NULL_DEREFERENCE"): {"fp": 1, "tp": 0},
        ("predator", "INVALID_FREE"): {"fp": 1, "tp": 0},
    }
    expected_beanstalkd = {
        ("infer", "NULL_DEREFERENCE"): {"fp": 0, "tp": 9},
        ("predator", "INVALID_DEREFERENCE"): {"fp": 125, "tp": 0},
        ("infer", "MEMORY_LEAK"): {"fp": 4, "tp": 1},
        ("infer", "DEAD_STORE"): {"fp": 8, "tp": 4},
        ("clang", "DEAD_STORE"): {"fp": 0, "tp": 3},
        ("clang", "NULL_DEREFERENCE"): {"fp": 0, "tp": 3},
        ("cppcheck", "MEMORY_LEAK"): {"fp": 0, "tp": 1},
        ("cppcheck", "RESOURCE_LEAK"): {"fp": 0, "tp": 1},
        ("predator", "MEMORY_LEAK"): {"fp": 3, "tp": 2},
        ("predator", "NULL_DEREFERENCE"): {"fp": 1, "tp": 0},
        ("predator", "INVALID_FREE"): {"fp": 1, "tp": 0},
    }
    for cell, want in expected_sds.items():
        check(announce, sds[cell] == want, f"sds {cell}: {sds[cell]}")
    for cell, want in expected_beanstalkd.items():
        check(announce, beanstalkd[cell] == want,
              f"beanstalkd {cell}: {beanstalkd[cell]}")


def test_4_ingestion_fidelity(announce):
    cases = [
        ("reports/infer_dead_store.txt", "infer",
         ("dead_store_false_positive_infer.c", 7, "DEAD_STORE")),
        ("reports/infer_null_deref.txt", "infer",
         ("null_dereference_true_positive_mallocverification.c", 13,
          "NULL_DEREFERENCE")),
        ("reports/cppcheck_struct_field_leak.txt", "cppcheck",
         ("memory_leak_true_positive_structwithpointer_infer.c", 19,
          "MEMORY_LEAK")),
        ("reports/cppcheck_realloc_leak.txt", "cppcheck",
         ("memory_leak_true_positive_realloc_infer.c", 14, "MEMORY_LEAK")),
        ("reports/predator_sizeof_leak.txt", "predator",
         ("memory_leak_false_negative_infer.c", 20, "MEMORY_LEAK")),
    ]
    for path, fmt, (file, line, kind) in cases:
        findings = parse_report(open(path, encoding="utf-8").read(), fmt)
        check(announce, len(findings) == 1, f"{path}: {len(findings)}")
        got = (findings[0].file, findings[0].line, findings[0].kind)
        check(announce, got == (file, line, kind), f"{path}: {got}")


def test_5_size_classes(announce):
    for lines, name in ((2000, "Small"), (6000, "Small"), (30000, "Medium"),
                        (64000, "Medium"), (100000, "Large")):
        cls = classify_program_size(lines)
        check(announce, cls.name == name and not cls.out_of_range,
              f"{lines} -> {cls}")


def test_6_persistence(announce):
    spot = {("sds.c", 159): 9, ("net.c", 28): 22, ("binlog.c", 215): 0.13}
    rows = 0
    for path in ("truth/sds.jsonl", "truth/beanstalkd.jsonl"):
        for e in load_truth_manifest(path).entries:
            if e.introduced_date is None or e.fixed_date is None:
                continue
            rows += 1
            got = compute_persistence(e.introduced_date, e.fixed_date)
            check(announce, got == e.interval_months,
                  f"{e.file}:{e.line}: {got} != {e.interval_months}")
            want = spot.pop((e.file, e.line), None)
            if want is not None:
                check(announce, got == want, f"{e.file}:{e.line}")
    check(announce, not spot, f"spot rows missing: {spot}")
    check(announce, rows == 23, f"expected 23 dated rows, saw {rows}")


def test_7_property_suite(announce):
    started = time.perf_counter()
    rng = random.Random(20240817)
    for _ in range(1000):
        source, expected = generate_program(rng)
        check(announce, analyzer_leak_lines(source) == expected, source)
    for buggy_path in sorted(glob.glob("corpus/*.c")):
        if buggy_path.endswith("_fixed.c"):
            continue
        buggy = analyze_unit(parse_file(buggy_path))
        fixed = analyze_unit(parse_file(buggy_path[:-2] + "_fixed.c"))
        check(announce, len(fixed) == 0 and len(buggy) >= 1, buggy_path)
    from test_properties import random_findings, random_truth
    from memlab.benchlab import classify
    for _ in range(1000):
        truth, findings = random_truth(rng), random_findings(rng)
        matrix, labels = classify(findings, truth)
        unmapped = sum(1 for _, lab in labels if lab == "UNMAPPED")
        check(announce, matrix.tp + matrix.fp + unmapped == len(findings))
    for path in sorted(glob.glob("corpus/*.c")):
        first = tuple(analyze_unit(parse_file(path)))
        second = tuple(analyze_unit(parse_file(path)))
        check(announce, first == second, path)
    check(announce, time.perf_counter() - started < 30.0, "too slow")
