"""Report assembly: per-repetition rows, aggregates, and the rendered tables.

A failed cell stays in the table as a null row (the sweep never aborts),
and aggregates are computed over the successful repetitions only, so one
bad cell cannot contaminate its neighbours.  The AS and ME baseline
columns are reserved but intentionally null: those methods live in
external tooling and are out of scope here.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

NOT_IMPLEMENTED_METHODS = ("AS", "ME")

_CSV_COLUMNS = (
    "method", "K", "repetition", "mae", "total_simulations",
    "accepted", "wall_total", "wall_selection", "completed", "error",
)


@dataclass(frozen=True)
class ReportRow:
    method: str
    K: int
    repetition: int
    mae: float = None            # None when the run failed or nothing was accepted
    total_simulations: int = None
    accepted: int = None
    wall_total: float = None
    wall_selection: float = None
    completed: bool = None
    error: str = None

    def __post_init__(self):
        if self.mae is not None and self.mae < 0:
            raise ValueError("MAE cannot be negative")
        if (
            self.wall_total is not None
            and self.wall_selection is not None
            and self.wall_selection > self.wall_total
        ):
            raise ValueError("selection time cannot exceed total time")

    @property
    def failed(self) -> bool:
        return self.error is not None


def _mean_std(values) -> tuple:
    """Mean and sample standard deviation (ddof=1); std is None for n < 2."""
    values = [v for v in values if v is not None]
    if not values:
        return None, None
    mean = sum(values) / len(values)
    if len(values) < 2:
        return mean, None
    var = sum((v - mean) ** 2 for v in values) / (len(values) - 1)
    return mean, math.sqrt(var)


def aggregate_rows(rows) -> list:
    """Per (method, K): mean and sample std over the non-null repetitions."""
    groups = {}
    for row in rows:
        groups.setdefault((row.method, row.K), []).append(row)
    aggregates = []
    for (method, K), group in sorted(groups.items(), key=lambda kv: (kv[0][0], kv[0][1])):
        ok = [r for r in group if not r.failed and r.mae is not None]
        mae_mean, mae_std = _mean_std([r.mae for r in ok])
        sims_mean, _ = _mean_std([r.total_simulations for r in ok])
        total_mean, total_std = _mean_std([r.wall_total for r in ok])
        sel_mean, sel_std = _mean_std([r.wall_selection for r in ok])
        aggregates.append(
            {
                "method": method,
                "K": K,
                "repetitions": len(group),
                "valid_repetitions": len(ok),
                "mae_mean": mae_mean,
                "mae_std": mae_std,
                "total_simulations_mean": sims_mean,
                "wall_total_mean": total_mean,
                "wall_total_std": total_std,
                "wall_selection_mean": sel_mean,
                "wall_selection_std": sel_std,
            }
        )
    return aggregates


def _fmt_cell(value, digits=2) -> str:
    return "-" if value is None else f"{value:.{digits}f}"


def _fmt_mean_std(mean, std, digits=2) -> str:
    if mean is None:
        return "-"
    if std is None:
        return f"{mean:.{digits}f}"
    return f"{mean:.{digits}f} +/- {std:.{digits}f}"


def render_tables(rows, aggregates) -> str:
    """Human-readable MAE and timing tables, one row per pool size."""
    methods = []
    for row in rows:
        if row.method not in methods:
            methods.append(row.method)
    pool_sizes = sorted({row.K for row in rows})
    agg = {(a["method"], a["K"]): a for a in aggregates}

    lines = ["MAE (mean +/- sample std over repetitions)", ""]
    header = ["K"] + methods + [f"{m} (not implemented)" for m in NOT_IMPLEMENTED_METHODS]
    table = [header]
    for K in pool_sizes:
        row = [str(K)]
        for m in methods:
            a = agg.get((m, K))
            row.append(_fmt_mean_std(a["mae_mean"], a["mae_std"]) if a else "-")
        row.extend("-" for _ in NOT_IMPLEMENTED_METHODS)
        table.append(row)
    lines.extend(_render_grid(table))

    lines.extend(["", "Wall time in seconds (total / selection only)", ""])
    table = [["K"] + methods]
    for K in pool_sizes:
        row = [str(K)]
        for m in methods:
            a = agg.get((m, K))
            if a and a["wall_total_mean"] is not None:
                row.append(
                    f"{_fmt_cell(a['wall_total_mean'])} / {_fmt_cell(a['wall_selection_mean'])}"
                )
            else:
                row.append("-")
        table.append(row)
    lines.extend(_render_grid(table))
    return "\n".join(lines) + "\n"


def _render_grid(table) -> list:
    widths = [max(len(row[i]) for row in table) for i in range(len(table[0]))]
    out = []
    for r, row in enumerate(table):
        out.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
        if r == 0:
            out.append("  ".join("-" * w for w in widths))
    return out


def write_report(rows, out_dir, extra: dict = None) -> None:
    """Write report.csv (per-repetition), report.json, and report.txt."""
    out_dir = Path(out_dir)
    aggregates = aggregate_rows(rows)

    with open(out_dir / "report.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    row.method, row.K, row.repetition,
                    "" if row.mae is None else repr(row.mae),
                    "" if row.total_simulations is None else row.total_simulations,
                    "" if row.accepted is None else row.accepted,
                    "" if row.wall_total is None else f"{row.wall_total:.6f}",
                    "" if row.wall_selection is None else f"{row.wall_selection:.6f}",
                    "" if row.completed is None else str(row.completed).lower(),
                    row.error or "",
                ]
            )

    doc = {
        "schema_version": 1,
        "rows": [
            {
                "method": r.method,
                "K": r.K,
                "repetition": r.repetition,
                "mae": r.mae,
                "total_simulations": r.total_simulations,
                "accepted": r.accepted,
                "wall_total": r.wall_total,
                "wall_selection": r.wall_selection,
                "completed": r.completed,
                "error": r.error,
            }
            for r in rows
        ],
        "aggregates": aggregates,
        "not_implemented": {
            m: "delegated to external tooling; column kept for table shape"
            for m in NOT_IMPLEMENTED_METHODS
        },
    }
    if extra:
        doc.update(extra)
    (out_dir / "report.json").write_text(json.dumps(doc, indent=2) + "\n")
    (out_dir / "report.txt").write_text(render_tables(rows, aggregates))


def load_report_rows(run_dir) -> list:
    """Read report.csv back into ReportRow objects."""
    path = Path(run_dir) / "report.csv"
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for rec in reader:
            rows.append(
                ReportRow(
                    method=rec["method"],
                    K=int(rec["K"]),
                    repetition=int(rec["repetition"]),
                    mae=float(rec["mae"]) if rec["mae"] else None,
                    total_simulations=int(rec["total_simulations"]) if rec["total_simulations"] else None,
                    accepted=int(rec["accepted"]) if rec["accepted"] else None,
                    wall_total=float(rec["wall_total"]) if rec["wall_total"] else None,
                    wall_selection=float(rec["wall_selection"]) if rec["wall_selection"] else None,
                    completed={"true": True, "false": False}.get(rec["completed"]),
                    error=rec["error"] or None,
                )
            )
    return rows
