"""Exact solvers for tiny instances, used as ground truth by the tests.

Nothing here shares code with the packers or the strategy enumerator.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

from .errors import OracleLimitError
from .histogram import SequenceLengthHistogram


@dataclass(frozen=True)
class OracleLimit:
    max_sequences: int = 12
    max_len: int = 16
    time_budget: float = 10.0  # seconds


def _first_fit_decreasing(items, capacity, depth):
    bins = []  # [load, count, contents]
    for item in items:
        for b in bins:
            if b[0] + item <= capacity and b[1] < depth:
                b[0] += item
                b[1] += 1
                b[2].append(item)
                break
        else:
            bins.append([item, 1, [item]])
    return [sorted(b[2]) for b in bins]


def optimal_pack_count(
    hist: SequenceLengthHistogram,
    max_len: int | None = None,
    max_depth: int | None = None,
    limit: OracleLimit = OracleLimit(),
) -> tuple[int, list[list[int]]]:
    """Minimum number of packs and one optimal assignment, by branch and bound.

    Items are placed longest first; equal lengths are forced into
    non-decreasing pack indices and packs with identical load and fill are
    tried only once, which removes the symmetric duplicates.
    """
    capacity = hist.max_len if max_len is None else max_len
    n = hist.total_sequences()
    if n > limit.max_sequences:
        raise OracleLimitError(f"{n} sequences exceed the oracle limit max_sequences={limit.max_sequences}")
    if capacity > limit.max_len:
        raise OracleLimitError(f"max_len {capacity} exceeds the oracle limit max_len={limit.max_len}")
    items = sorted(
        (length for length, count in hist.nonzero().items() for _ in range(count)), reverse=True
    )
    if any(item > capacity for item in items):
        raise OracleLimitError(f"a sequence is longer than the capacity {capacity}")
    depth = n if max_depth is None else max_depth
    if n == 0:
        return 0, []

    best = _first_fit_decreasing(items, capacity, depth)
    lower = max(math.ceil(sum(items) / capacity), math.ceil(n / depth))
    if len(best) == lower:
        return len(best), best

    deadline = time.monotonic() + limit.time_budget
    loads: list[int] = []
    fills: list[int] = []
    contents: list[list[int]] = []
    placed_in = [0] * n

    def search(k: int) -> bool:
        nonlocal best
        if time.monotonic() > deadline:
            raise OracleLimitError(f"oracle time budget of {limit.time_budget}s exhausted")
        if k == n:
            if len(loads) < len(best):
                best = [sorted(c) for c in contents]
            return len(best) == lower
        item = items[k]
        start = placed_in[k - 1] if k and items[k - 1] == item else 0
        seen = set()
        for j in range(start, len(loads)):
            state = (loads[j], fills[j])
            if state in seen or loads[j] + item > capacity or fills[j] >= depth:
                continue
            seen.add(state)
            loads[j] += item
            fills[j] += 1
            contents[j].append(item)
            placed_in[k] = j
            done = search(k + 1)
            loads[j] -= item
            fills[j] -= 1
            contents[j].pop()
            if done:
                return True
        if len(loads) + 1 < len(best):
            loads.append(item)
            fills.append(1)
            contents.append([item])
            placed_in[k] = len(loads) - 1
            done = search(k + 1)
            loads.pop()
            fills.pop()
            contents.pop()
            if done:
                return True
        return False

    search(0)
    return len(best), best


def _at_most(n: int, k: int) -> int:
    # p(n, k) = p(n, k - 1) + p(n - k, k): partitions of n into at most k parts
    table = [1] + [0] * n  # k = 0
    for parts in range(1, k + 1):
        for total in range(parts, n + 1):
            table[total] += table[total - parts]
    return table[n]


def count_exact_partitions(max_len: int, depth: int) -> int:
    """Number of partitions of ``max_len`` into at most ``depth`` parts."""
    if not 1 <= max_len <= 1024:
        raise ValueError("max_len must lie in 1..1024")
    if not 1 <= depth <= 4:
        raise ValueError("depth must lie in 1..4")
    return _at_most(max_len, depth)
