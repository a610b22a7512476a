"""Report artifacts: JSON (array of check records), CSV summary, and a
human-readable table.  Records are sorted deterministically; the only
fields that vary between identical runs are the runtime measurements.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .conventions import manifest_hash

SCHEMA_VERSION = 1

CSV_COLUMNS = [
    "check_id", "fixture", "seed", "status", "residual_sup", "residual_l2",
    "tolerance", "convergence_order", "runtime_ms",
]


def sort_key(rec: dict):
    return (rec["check_id"], rec["fixture"], rec["seed"])


def report_dict(records: list[dict]) -> dict:
    records = sorted(records, key=sort_key)
    counts = {"pass": 0, "fail": 0, "skipped-with-reason": 0}
    for r in records:
        counts[r["status"]] = counts.get(r["status"], 0) + 1
    return {
        "schema_version": SCHEMA_VERSION,
        "manifest_hash": manifest_hash(),
        "summary": counts,
        "results": records,
    }


def write_json(records: list[dict], path: Path) -> dict:
    rep = report_dict(records)
    path.write_text(json.dumps(rep, indent=2, sort_keys=True) + "\n")
    return rep


def write_csv(records: list[dict], path: Path):
    with path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, extrasaction="ignore")
        writer.writeheader()
        for rec in sorted(records, key=sort_key):
            writer.writerow({k: rec.get(k) for k in CSV_COLUMNS})


def format_table(records: list[dict]) -> str:
    out = io.StringIO()
    hdr = f"{'check':14s} {'fixture':7s} {'status':19s} {'residual':>11s} {'tol':>8s} {'order':>6s}"
    out.write(hdr + "\n" + "-" * len(hdr) + "\n")
    for rec in sorted(records, key=sort_key):
        order = rec.get("convergence_order")
        order_s = f"{order:.2f}" if isinstance(order, float) else "-"
        res = rec["residual_sup"]
        res_s = f"{res:.3e}" if res == res else "nan"
        out.write(
            f"{rec['check_id']:14s} {rec['fixture']:7s} {rec['status']:19s} "
            f"{res_s:>11s} {rec['tolerance']:>8.0e} {order_s:>6s}\n"
        )
        if rec["status"] == "skipped-with-reason":
            out.write(f"    reason: {rec['reason']}\n")
    rep = report_dict(records)
    out.write(
        f"\n{rep['summary'].get('pass', 0)} passed, "
        f"{rep['summary'].get('fail', 0)} failed, "
        f"{rep['summary'].get('skipped-with-reason', 0)} skipped "
        f"(manifest {rep['manifest_hash']})\n"
    )
    return out.getvalue()
