"""Shortest-pack-first (worst-fit) and longest-pack-first (best-fit) histogram packing.

Both walk the histogram from the longest to the shortest length and place
whole histogram bins at once. Open packs that share a strategy are kept as a
single group with a pack count, so the work is bounded by the number of
distinct strategies rather than the number of sequences. Groups remember the
index of their first pack, which makes ties resolve to the earliest-created
pack exactly as a per-sample implementation would.
"""

from __future__ import annotations

import bisect
from collections import Counter
from dataclasses import dataclass

from .histogram import SequenceLengthHistogram
from .solution import PackingSolution
from .strategy import Strategy


@dataclass
class PackGroup:
    """``pack_count`` identical open packs following ``strategy_so_far``."""

    strategy_so_far: Strategy
    remaining_capacity: int
    pack_count: int
    first_pack: int


class _OpenPacks:
    """Open groups bucketed by remaining capacity, earliest first within a bucket."""

    def __init__(self):
        self.buckets: dict[int, list[tuple[int, PackGroup]]] = {}
        self.capacities: list[int] = []  # sorted, non-empty buckets only

    def add(self, group: PackGroup) -> None:
        bucket = self.buckets.get(group.remaining_capacity)
        if bucket is None:
            bucket = self.buckets[group.remaining_capacity] = []
            bisect.insort(self.capacities, group.remaining_capacity)
        bisect.insort(bucket, (group.first_pack, group), key=lambda item: item[0])

    def pop_first(self, capacity: int) -> PackGroup:
        bucket = self.buckets[capacity]
        _, group = bucket.pop(0)
        if not bucket:
            del self.buckets[capacity]
            self.capacities.pop(bisect.bisect_left(self.capacities, capacity))
        return group

    def widest(self, length: int) -> int | None:
        if self.capacities and self.capacities[-1] >= length:
            return self.capacities[-1]
        return None

    def tightest(self, length: int) -> int | None:
        idx = bisect.bisect_left(self.capacities, length)
        return self.capacities[idx] if idx < len(self.capacities) else None

    def groups(self):
        for bucket in self.buckets.values():
            for _, group in bucket:
                yield group


def _resolve_depth(max_depth: int | None, max_len: int) -> int:
    if max_depth is None:
        return max_len
    if max_depth < 1:
        raise ValueError(f"max_depth must be >= 1, got {max_depth}")
    return min(int(max_depth), max_len)


def _histogram_fit(
    hist: SequenceLengthHistogram, max_depth: int | None, best_fit: bool, split_counts: bool
) -> PackingSolution:
    max_len = hist.max_len
    depth_cap = _resolve_depth(max_depth, max_len)
    open_packs = _OpenPacks()
    closed: Counter = Counter()
    next_pack = 0

    def place(group: PackGroup) -> None:
        if group.strategy_so_far.depth >= depth_cap or group.remaining_capacity == 0:
            closed[group.strategy_so_far] += group.pack_count
        else:
            open_packs.add(group)

    for length in range(max_len, 0, -1):
        count = int(hist.counts[length - 1])
        if count == 0:
            continue

        if split_counts:
            per_pack = max_len // length
            if 2 <= per_pack <= depth_cap and per_pack * length == max_len:
                full = count // per_pack
                if full:
                    closed[Strategy([length] * per_pack)] += full
                    next_pack += full
                    count -= full * per_pack

        while count:
            capacity = open_packs.tightest(length) if best_fit else open_packs.widest(length)
            if capacity is None:
                # A fresh pack is the only one that fits, so it keeps taking
                # this length until it is full or at depth.
                per_pack = min(max_len // length, depth_cap)
                full, partial = divmod(count, per_pack)
                if full:
                    place(PackGroup(Strategy([length] * per_pack),
                                    max_len - per_pack * length, full, next_pack))
                    next_pack += full
                if partial:
                    place(PackGroup(Strategy([length] * partial),
                                    max_len - partial * length, 1, next_pack))
                    next_pack += 1
                break

            group = open_packs.pop_first(capacity)
            if best_fit:
                # the pack just extended is now the tightest fit, so each pack
                # of the group absorbs this length until it is full or at depth
                per_pack = min(capacity // length, depth_cap - group.strategy_so_far.depth)
            else:
                # the extended pack drops below its siblings: one per pack
                per_pack = 1
            full = min(count // per_pack, group.pack_count)
            used = full
            if full:
                place(PackGroup(Strategy(group.strategy_so_far + (length,) * per_pack),
                                capacity - per_pack * length, full, group.first_pack))
                count -= full * per_pack
            if count and full < group.pack_count and count < per_pack:
                place(PackGroup(Strategy(group.strategy_so_far + (length,) * count),
                                capacity - count * length, 1, group.first_pack + full))
                used += 1
                count = 0
            if used < group.pack_count:
                open_packs.add(PackGroup(group.strategy_so_far, capacity,
                                         group.pack_count - used, group.first_pack + used))

    for group in open_packs.groups():
        closed[group.strategy_so_far] += group.pack_count
    return PackingSolution.from_counts(
        max_len, closed, algorithm="lpfhp" if best_fit else "spfhp", max_depth=depth_cap
    )


def spfhp(hist: SequenceLengthHistogram, max_depth: int | None = None) -> PackingSolution:
    """Shortest-pack-first histogram packing (worst-fit on descending lengths).

    Each sequence goes to the open pack with the most space left that is not
    yet at ``max_depth``; if none fits a new pack is opened. ``None`` means
    no depth limit.
    """
    return _histogram_fit(hist, max_depth, best_fit=False, split_counts=False)


def lpfhp(hist: SequenceLengthHistogram, max_depth: int | None = None) -> PackingSolution:
    """Longest-pack-first histogram packing (best-fit on descending lengths).

    Lengths that divide ``max_len`` exactly ``k >= 2`` times are first packed
    ``k`` to a pack, so e.g. two 256s fill a 512 pack before anything else is
    considered; the rest is placed into the fullest open pack that still fits.
    """
    return _histogram_fit(hist, max_depth, best_fit=True, split_counts=True)
