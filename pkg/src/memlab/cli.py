"""Command-line front end.

Commands: ``analyze`` (run checkers over C sources), ``bench`` (corpus
expectations or ingested-report classification), ``ingest`` (normalize an
external tool report), and ``persistence`` (defect lifetime in months).

Exit codes: 0 when there is nothing to report (or a conversion succeeded),
1 when findings were produced or expectations failed, 2 on usage, parse,
format, or manifest errors.

Configuration precedence for ``analyze``: command-line flags override the
config file, which overrides the profile's defaults.  The profile itself is
picked from ``--profile``, else the config file, else the MEMLAB_PROFILE
environment variable, else ``union``.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import os
import sys
import time
from dataclasses import replace
from datetime import datetime
from pathlib import Path

from . import benchlab
from .analysis import ALL_CHECKERS, PROFILES, analyze_unit
from .diagnostics import Report, emit_structured, render_text
from .frontend import LexError, ParseError, parse_file
from .ingest import PARSERS, FormatError, parse_report


class UsageError(Exception):
    pass


_CONFIG_BOOL_KEYS = ("interprocedural", "sizeof_star_tracking",
                     "realloc_with_calls", "struct_field_leak")
_CONFIG_INT_KEYS = ("unroll_bound", "path_budget")


def _read_config_file(path: str) -> dict:
    """Parse a simple ``key=value`` config file; # starts a comment."""
    values: dict[str, str] = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    for idx, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{idx}: expected key=value")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


def _parse_bool(raw: str, key: str) -> bool:
    lowered = raw.lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise UsageError(f"config key {key}: expected a boolean, got {raw!r}")


def _split_checkers(raw) -> frozenset:
    names: set[str] = set()
    for chunk in raw if isinstance(raw, (list, tuple)) else [raw]:
        names.update(n.strip() for n in chunk.split(",") if n.strip())
    unknown = names - ALL_CHECKERS
    if unknown:
        raise UsageError(f"unknown checker ids: {sorted(unknown)}")
    return frozenset(names)


def resolve_config(args) -> "PROFILES.__class__":
    """Build the checker configuration from flags, config file, profile."""
    file_values = _read_config_file(args.config) if args.config else {}
    profile = args.profile or file_values.get("profile") \
        or os.environ.get("MEMLAB_PROFILE") or "union"
    if profile not in PROFILES:
        raise UsageError(f"unknown profile {profile!r}")
    config = PROFILES[profile]

    # Config-file overrides.
    for key, value in file_values.items():
        if key == "profile":
            continue
        elif key in _CONFIG_BOOL_KEYS:
            config = replace(config, **{key: _parse_bool(value, key)})
        elif key in _CONFIG_INT_KEYS:
            try:
                config = replace(config, **{key: int(value)})
            except ValueError:
                raise UsageError(f"config key {key}: expected an integer") \
                    from None
        elif key == "enable":
            config = config.with_checkers(enable=_split_checkers(value))
        elif key == "disable":
            config = config.with_checkers(disable=_split_checkers(value))
        else:
            raise UsageError(f"unknown config key {key!r}")

    # Flag overrides.
    for key in _CONFIG_BOOL_KEYS + _CONFIG_INT_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            config = replace(config, **{key: value})
    if args.enable:
        config = config.with_checkers(enable=_split_checkers(args.enable))
    if args.disable:
        config = config.with_checkers(disable=_split_checkers(args.disable))
    return config


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_analyze(args) -> int:
    config = resolve_config(args)
    started = time.perf_counter()

    def analyze_one(path: str):
        return analyze_unit(parse_file(path), config=config)

    results = []
    if args.jobs > 1 and len(args.paths) > 1:
        with concurrent.futures.ThreadPoolExecutor(args.jobs) as pool:
            # Buffered per unit, emitted in command-line path order.
            results = list(pool.map(analyze_one, args.paths))
    else:
        results = [analyze_one(path) for path in args.paths]

    findings = [f for result in results for f in result]
    incomplete = any(r.incomplete for r in results)
    elapsed = time.perf_counter() - started
    report = Report(findings, incomplete=incomplete, elapsed=elapsed)
    if args.format == "structured":
        sys.stdout.write(emit_structured(report))
    else:
        sys.stdout.write(render_text(report))
    if args.timings:
        print(f"elapsed: {elapsed:.3f}s", file=sys.stderr)
    return 1 if findings else 0


def cmd_bench(args) -> int:
    if bool(args.corpus) == bool(args.truth):
        raise UsageError("bench needs exactly one of --corpus or --truth")
    if args.corpus:
        manifest = benchlab.load_corpus_manifest(args.corpus)
        profile = args.profile or "union"
        if profile not in PROFILES:
            raise UsageError(f"unknown profile {profile!r}")
        report = benchlab.run_corpus(manifest, PROFILES[profile])
        sys.stdout.write(benchlab.render_bench_report(report))
        return 0 if report.all_passed else 1
    if not args.ingested:
        raise UsageError("--truth requires --ingested")
    truth = benchlab.load_truth_manifest(args.truth)
    text = _read_input_file(args.ingested)
    findings = parse_report(text, args.report_format)
    matrix, labels = benchlab.classify(findings, truth.entries,
                                       tolerance=args.tolerance)
    unmapped = sum(1 for _, label in labels if label == "UNMAPPED")
    print(f"program: {truth.program}")
    print(f"tp={matrix.tp} fp={matrix.fp} fn={matrix.fn} tn={matrix.tn}")
    print(f"unmapped={unmapped}")
    return 0


def cmd_ingest(args) -> int:
    text = _read_input_file(args.report)
    findings = parse_report(text, args.report_format)
    sys.stdout.write(emit_structured(Report(findings)))
    return 0


def _parse_cli_date(raw: str):
    for fmt in ("%Y-%m-%d", "%d/%m/%Y"):
        try:
            return datetime.strptime(raw, fmt).date()
        except ValueError:
            continue
    raise UsageError(f"cannot parse date {raw!r} (expected YYYY-MM-DD or "
                     "DD/MM/YYYY)")


def _format_months(value) -> str:
    return str(value) if isinstance(value, int) else f"{value:.2f}"


def cmd_persistence(args) -> int:
    if args.truth:
        if args.dates:
            raise UsageError("give either --truth or two dates, not both")
        manifest = benchlab.load_truth_manifest(args.truth)
        for e in manifest.entries:
            if e.introduced_date is None or e.fixed_date is None:
                continue
            months = benchlab.compute_persistence(e.introduced_date,
                                                  e.fixed_date)
            print(f"{e.file}:{e.line} {e.kind}: {_format_months(months)}")
        return 0
    if len(args.dates) != 2:
        raise UsageError("persistence needs an introduced and a fixed date")
    introduced, fixed = (_parse_cli_date(d) for d in args.dates)
    months = benchlab.compute_persistence(introduced, fixed)
    print(_format_months(months))
    return 0


def _read_input_file(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="memlab",
        description="Static memory-error analysis and benchmarking for a C "
                    "subset.",
        epilog="Configuration precedence: flags > config file > profile "
               "defaults. MEMLAB_PROFILE sets the default profile.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_an = sub.add_parser("analyze", help="analyze C source files")
    p_an.add_argument("paths", nargs="+", metavar="FILE")
    p_an.add_argument("--profile", choices=sorted(PROFILES))
    p_an.add_argument("--config", help="key=value configuration file")
    p_an.add_argument("--enable", action="append", default=[],
                      metavar="CHECKER")
    p_an.add_argument("--disable", action="append", default=[],
                      metavar="CHECKER")
    p_an.add_argument("--format", choices=("text", "structured"),
                      default="text")
    p_an.add_argument("--interprocedural", type=int, choices=(0, 1),
                      default=None)
    p_an.add_argument("--sizeof-star-tracking", dest="sizeof_star_tracking",
                      type=int, choices=(0, 1), default=None)
    p_an.add_argument("--realloc-with-calls", dest="realloc_with_calls",
                      type=int, choices=(0, 1), default=None)
    p_an.add_argument("--struct-field-leak", dest="struct_field_leak",
                      type=int, choices=(0, 1), default=None)
    p_an.add_argument("--unroll-bound", dest="unroll_bound", type=int,
                      default=None)
    p_an.add_argument("--path-budget", dest="path_budget", type=int,
                      default=None)
    p_an.add_argument("--jobs", type=int, default=1)
    p_an.add_argument("--timings", action="store_true")
    p_an.set_defaults(func=cmd_analyze)

    p_be = sub.add_parser("bench", help="run corpus or classify a report")
    p_be.add_argument("--corpus", help="corpus manifest (JSONL)")
    p_be.add_argument("--profile", default=None)
    p_be.add_argument("--truth", help="ground-truth manifest (JSONL)")
    p_be.add_argument("--ingested", help="tool report to classify")
    p_be.add_argument("--format", dest="report_format",
                      choices=sorted(PARSERS), default="memlab")
    p_be.add_argument("--tolerance", type=int, default=0,
                      help="line-match tolerance")
    p_be.set_defaults(func=cmd_bench)

    p_in = sub.add_parser("ingest", help="normalize an external tool report")
    p_in.add_argument("report", metavar="REPORT")
    p_in.add_argument("--format", dest="report_format", required=True,
                      choices=sorted(PARSERS))
    p_in.set_defaults(func=cmd_ingest)

    p_pe = sub.add_parser("persistence",
                          help="defect lifetime in calendar months")
    p_pe.add_argument("dates", nargs="*", metavar="DATE")
    p_pe.add_argument("--truth", help="print intervals for a truth manifest")
    p_pe.set_defaults(func=cmd_persistence)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (UsageError, LexError, ParseError, FormatError,
            benchlab.ManifestError, benchlab.NegativeInterval,
            benchlab.UnknownVersion, ValueError) as exc:
        print(f"memlab: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"memlab: error: {exc}", file=sys.stderr)
        return 2
