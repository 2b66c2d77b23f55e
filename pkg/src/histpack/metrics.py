"""Packing statistics and per-depth summary reports."""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass
from typing import Iterable

from .errors import DuplicateRowError
from .histogram import SequenceLengthHistogram
from .solution import PackingSolution

REPORT_HEADER = (
    "packing_depth",
    "algorithm",
    "num_packs",
    "efficiency_pct",
    "packing_factor",
    "overhead_pct",
    "realized_speedup",
)


@dataclass(frozen=True)
class PackingStats:
    num_packs: int
    total_tokens: int
    padding_tokens: int
    real_tokens: int
    total_sequences: int
    efficiency: float
    packing_factor: float
    strategies_used: int
    max_depth_observed: int


def evaluate(hist: SequenceLengthHistogram, solution: PackingSolution) -> PackingStats:
    """Exact token accounting for ``solution`` packing ``hist``.

    The solution is checked first; a coverage violation raises
    :class:`~histpack.errors.CoverageError` naming the first bad length.
    """
    solution.check(hist)
    packs = solution.num_packs
    total = packs * hist.max_len
    real = hist.total_tokens()
    n = hist.total_sequences()
    return PackingStats(
        num_packs=packs,
        total_tokens=total,
        padding_tokens=total - real,
        real_tokens=real,
        total_sequences=n,
        efficiency=real / total if total else 0.0,
        packing_factor=n / packs if packs else 0.0,
        strategies_used=sum(1 for _, r in solution.mixture if r >= 1),
        max_depth_observed=solution.deepest,
    )


def realized_speedup(packing_factor: float, overhead_fraction: float = 0.0) -> float:
    """Packing factor discounted by the relative throughput overhead."""
    if overhead_fraction < 0:
        raise ValueError("overhead_fraction must be non-negative")
    return packing_factor / (1.0 + overhead_fraction)


@dataclass(frozen=True)
class ReportRow:
    packing_depth: str
    algorithm: str
    num_packs: int
    efficiency_pct: float
    packing_factor: float
    overhead_pct: float
    realized_speedup: float

    def as_csv_fields(self) -> list[str]:
        return [
            self.packing_depth,
            self.algorithm,
            str(self.num_packs),
            f"{self.efficiency_pct:.3f}",
            f"{self.packing_factor:.3f}",
            f"{self.overhead_pct:.3f}",
            f"{self.realized_speedup:.3f}",
        ]


def depth_label(solution: PackingSolution, stats: PackingStats) -> str:
    """``"3"`` for a limited depth, ``"16/max"`` when the limit was never binding."""
    depth = solution.max_depth
    if depth is None or depth >= solution.max_len:
        return f"{stats.max_depth_observed}/max"
    return str(depth)


def report_row(
    solution: PackingSolution, stats: PackingStats, overhead_fraction: float = 0.0
) -> ReportRow:
    return ReportRow(
        packing_depth=depth_label(solution, stats),
        algorithm=solution.algorithm,
        num_packs=stats.num_packs,
        efficiency_pct=100.0 * stats.efficiency,
        packing_factor=stats.packing_factor,
        overhead_pct=100.0 * overhead_fraction,
        realized_speedup=realized_speedup(stats.packing_factor, overhead_fraction),
    )


def _depth_sort_key(label: str):
    head = label.split("/")[0]
    return (label.endswith("/max"), int(head) if head.isdigit() else 0)


def format_report(rows: Iterable[ReportRow]) -> str:
    """CSV report with a fixed column order, rows sorted by depth; duplicates are an error."""
    rows = list(rows)
    seen = set()
    for row in rows:
        key = (row.packing_depth, row.algorithm)
        if key in seen:
            raise DuplicateRowError(
                f"duplicate report row for depth {row.packing_depth}, algorithm {row.algorithm}"
            )
        seen.add(key)
    rows.sort(key=lambda r: (_depth_sort_key(r.packing_depth), r.algorithm))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(REPORT_HEADER)
    for row in rows:
        writer.writerow(row.as_csv_fields())
    return buf.getvalue()


def stats_dict(stats: PackingStats) -> dict:
    return asdict(stats)
