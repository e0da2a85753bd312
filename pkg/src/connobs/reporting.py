"""Rendering of obstruction reports: the verdict table (1 = the class
does not vanish) and the machine-readable document.  Both views are
generated from the same report object, so they cannot disagree."""

from __future__ import annotations

from typing import List, Optional

from .obstructions import Connection, ObstructionReport


def _fmt_verdict(v: Optional[int]) -> str:
    return "-" if v is None else str(v)


def connection_payload(conn: Connection) -> dict:
    return {
        "generators": [
            [str(c) for c in d.coeffs] for d in conn.vfield_gens.generators
        ],
        "operators": [str(p) for p in conn.operators],
        "annotation": conn.annotation or None,
    }


def report_payload(report: ObstructionReport, include_witnesses: bool = True) -> dict:
    """The machine-readable record for one module."""
    doc: dict = {"module": report.module_id}
    if report.aclass is not None:
        entry = {"vanishes": report.aclass.vanishes}
        if report.aclass.certificate is not None and include_witnesses:
            entry["certificate"] = str(report.aclass.certificate)
        doc["aclass"] = entry
    if report.ks_proper is not None:
        doc["kskernel"] = {
            "proper": report.ks_proper,
            "generators": [
                [str(c) for c in d.coeffs]
                for d in report.ks_kernel.generators
            ],
        }
    if report.lclass is not None:
        entry = {"vanishes": report.lclass.vanishes}
        if report.lclass.certificate is not None and include_witnesses:
            entry["certificate"] = str(report.lclass.certificate)
        doc["lclass"] = entry
    if report.connection is not None and include_witnesses:
        doc["connection"] = connection_payload(report.connection)
        if report.connection_verified is not None:
            doc["connection"]["verified"] = report.connection_verified
    if report.annotations:
        doc["annotations"] = list(report.annotations)
    doc["timings_ms"] = dict(report.timings_ms)
    return doc


def render_table(reports: List[ObstructionReport], title: str = "") -> str:
    """Verdict table in the 0/1 convention, one row per module."""
    headers = ["Module", "AClass", "KSKernel", "LClass", "Time"]
    rows = []
    for rep in reports:
        a, k, l = rep.triple()
        total_ms = sum(rep.timings_ms.values())
        rows.append([
            rep.module_id,
            _fmt_verdict(a),
            _fmt_verdict(k),
            _fmt_verdict(l),
            f"{total_ms / 1000.0:.2f}s",
        ])
    widths = [
        max(len(headers[c]), *(len(r[c]) for r in rows)) if rows else len(headers[c])
        for c in range(len(headers))
    ]
    lines = []
    if title:
        lines.append(title)
    lines.append(" | ".join(h.ljust(widths[c]) for c, h in enumerate(headers)))
    lines.append("-+-".join("-" * w for w in widths))
    for r in rows:
        lines.append(" | ".join(r[c].ljust(widths[c]) for c in range(len(headers))))
    return "\n".join(lines)


def verify_outcome(expected, actual) -> bool:
    """Compare a verdict triple against expectations; None is a wildcard."""
    return all(e is None or e == a for e, a in zip(expected, actual))
