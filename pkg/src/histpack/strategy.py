"""Packing strategies and the sparse packing matrix.

A strategy is a sorted multiset of sequence lengths that share one pack.
For least-squares packing we enumerate every strategy whose lengths add up
to exactly ``max_len``; any pack can be completed with a padding sequence of
the missing length, so nothing is lost by the restriction.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import DepthLimitError
from .sparse import CscMatrix

MAX_ENUMERATION_DEPTH = 4


class Strategy(tuple):
    """Canonical (non-decreasing) tuple of positive sequence lengths."""

    __slots__ = ()

    def __new__(cls, lengths: Iterable[int] = ()):
        items = sorted(int(x) for x in lengths)
        if items and items[0] < 1:
            raise ValueError(f"strategy lengths must be positive, got {items[0]}")
        return super().__new__(cls, items)

    @property
    def depth(self) -> int:
        return len(self)

    @property
    def total(self) -> int:
        return sum(self)

    def implicit_padding(self, max_len: int) -> int:
        pad = max_len - self.total
        if pad < 0:
            raise ValueError(f"strategy {list(self)} exceeds max_len {max_len}")
        return pad

    def extended(self, length: int) -> "Strategy":
        return Strategy((*self, length))

    def __repr__(self):
        return f"Strategy({list(self)})"


def canonical_key(strategy: Sequence[int]) -> tuple:
    """Sort key: by depth, then lexicographically."""
    return (len(strategy), tuple(strategy))


@dataclass(frozen=True)
class StrategySet:
    max_len: int
    max_depth: int
    strategies: tuple[Strategy, ...]

    def __len__(self):
        return len(self.strategies)

    def __iter__(self) -> Iterator[Strategy]:
        return iter(self.strategies)

    def __getitem__(self, j) -> Strategy:
        return self.strategies[j]

    def to_json(self) -> str:
        return json.dumps(
            {
                "max_len": self.max_len,
                "max_depth": self.max_depth,
                "strategies": [list(s) for s in self.strategies],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "StrategySet":
        data = json.loads(text)
        return cls(
            int(data["max_len"]),
            int(data["max_depth"]),
            tuple(Strategy(s) for s in data["strategies"]),
        )


def _partitions(total: int, parts: int, smallest: int, step: int) -> Iterator[tuple[int, ...]]:
    # non-decreasing tuples of exactly `parts` multiples of `step`, each >= smallest
    if parts == 1:
        if total >= smallest:
            yield (total,)
        return
    # the first part may be at most total // parts or the rest cannot stay >= it
    for first in range(smallest, total // parts + 1, step):
        for rest in _partitions(total - first, parts - 1, first, step):
            yield (first, *rest)


def enumerate_strategies(max_len: int, max_depth: int, granularity: int = 1) -> StrategySet:
    """All strategies of at most ``max_depth`` parts summing exactly to ``max_len``.

    With ``granularity=2`` only even lengths are used (pair with
    :func:`histpack.histogram.coarsen_even`).
    """
    if max_len < 1:
        raise ValueError(f"max_len must be positive, got {max_len}")
    if max_depth < 1:
        raise ValueError(f"max_depth must be positive, got {max_depth}")
    if max_depth > MAX_ENUMERATION_DEPTH:
        raise DepthLimitError(
            f"enumeration depth {max_depth} > {MAX_ENUMERATION_DEPTH} is refused: the strategy "
            f"count grows like max_len**(depth-1) (about 940K already at depth 4, max_len 512)"
        )
    if granularity < 1 or max_len % granularity:
        raise ValueError(f"max_len {max_len} is not a multiple of granularity {granularity}")
    strategies = []
    for depth in range(1, max_depth + 1):
        strategies.extend(
            Strategy(p)
            for p in _partitions(max_len, depth, granularity, granularity)
        )
    return StrategySet(max_len, max_depth, tuple(strategies))


def closed_form_strategy_count(max_len: int, depth: int) -> float:
    """Closed-form approximation of the number of strategies of exactly ``depth`` parts."""
    s = float(max_len)
    if depth == 2:
        return float(max_len // 2)
    if depth == 3:
        return s * s / 12.0
    if depth == 4:
        return s * (s + 4.0) * (2.0 * s + 1.0) / 288.0
    raise ValueError(f"closed form is only available for depth 2..4, got {depth}")


class PackingMatrix(CscMatrix):
    """Sparse ``max_len x |strategies|`` count matrix.

    Row ``i - 1`` counts the sequences of length ``i``; column ``j`` encodes
    ``strategies[j]``.
    """

    def __init__(self, strategy_set: StrategySet, indptr, indices, data):
        super().__init__((strategy_set.max_len, len(strategy_set)), indptr, indices, data)
        self.strategy_set = strategy_set

    def strategy(self, j: int) -> Strategy:
        rows, vals = self.column(j)
        return Strategy(np.repeat(rows + 1, vals).tolist())


def build_packing_matrix(strategy_set: StrategySet) -> PackingMatrix:
    if len(strategy_set) == 0:
        raise ValueError("cannot build a packing matrix from an empty strategy set")
    indptr = np.zeros(len(strategy_set) + 1, dtype=np.int64)
    indices: list[int] = []
    data: list[int] = []
    for j, strategy in enumerate(strategy_set):
        counts = Counter(strategy)
        for length in sorted(counts):
            indices.append(length - 1)
            data.append(counts[length])
        indptr[j + 1] = len(indices)
    return PackingMatrix(
        strategy_set,
        indptr,
        np.asarray(indices, dtype=np.int64),
        np.asarray(data, dtype=np.int64),
    )
