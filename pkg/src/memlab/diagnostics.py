"""Stable text and structured rendering of findings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .analysis import Finding


def _sort_key(f: Finding):
    return (f.file, f.line, f.kind, f.checker, f.message, f.function)


@dataclass
class Report:
    findings: list
    incomplete: bool = False
    elapsed: float = 0.0
    summary: dict = field(init=False)

    def __post_init__(self):
        self.findings = sorted(self.findings, key=_sort_key)
        counts: dict[str, int] = {}
        for f in self.findings:
            counts[f.kind] = counts.get(f.kind, 0) + 1
        self.summary = counts


def render_text(report: Report) -> str:
    """Console rendering; byte-stable for equal reports."""
    n = len(report.findings)
    if n == 0:
        return "Found 0 issues\n"
    lines = [f"Found {n} issue" + ("s" if n != 1 else ""), ""]
    for f in report.findings:
        lines.append(f"{f.file}:{f.line}: error: {f.kind}")
        lines.append(f"  {f.message}")
        lines.append("")
    lines.append("Summary of the reports")
    lines.append("")
    for kind in sorted(report.summary):
        lines.append(f"  {kind}: {report.summary[kind]}")
    if report.incomplete:
        lines.append("")
        lines.append("warning: analysis incomplete (path budget exceeded)")
    return "\n".join(lines) + "\n"


def emit_structured(report: Report) -> str:
    """One JSON record per finding, stable key order; round-trips through
    the ingest module's memlab reader."""
    out = []
    for f in report.findings:
        out.append(json.dumps({
            "file": f.file,
            "line": f.line,
            "kind": f.kind,
            "checker": f.checker,
            "message": f.message,
            "function": f.function,
        }, sort_keys=False))
    return "".join(line + "\n" for line in out)
