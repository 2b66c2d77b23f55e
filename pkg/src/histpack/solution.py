"""The result type shared by every packer."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import CoverageError, HistpackError
from .histogram import SequenceLengthHistogram
from .strategy import Strategy, canonical_key

ALGORITHMS = ("none", "spfhp", "lpfhp", "nnlshp", "ennlshp")


@dataclass(frozen=True)
class PackingSolution:
    """A mixture of strategies with repeat counts.

    ``padding_sequences`` lists explicit padding sequences that had to be
    created to realise the mixture (NNLS packers only); implicit padding
    at the end of each pack is not listed.
    """

    max_len: int
    mixture: tuple[tuple[Strategy, int], ...]
    padding_sequences: tuple[tuple[int, int], ...] = ()
    algorithm: str = "none"
    max_depth: int | None = None
    extra: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_counts(
        cls,
        max_len: int,
        mixture: Mapping[Strategy, int] | Iterable[tuple[Iterable[int], int]],
        padding: Mapping[int, int] | None = None,
        algorithm: str = "none",
        max_depth: int | None = None,
        extra: dict | None = None,
    ) -> "PackingSolution":
        """Merge duplicate strategies, drop zero repeats and sort canonically."""
        merged: Counter = Counter()
        items = mixture.items() if isinstance(mixture, Mapping) else mixture
        for strategy, repeat in items:
            if repeat < 0:
                raise ValueError(f"negative repeat {repeat} for {list(strategy)}")
            if repeat:
                merged[Strategy(strategy)] += int(repeat)
        pads = sorted((int(k), int(v)) for k, v in (padding or {}).items() if v)
        if any(v < 0 for _, v in pads):
            raise ValueError("padding counts must be non-negative")
        ordered = tuple(sorted(merged.items(), key=lambda kv: canonical_key(kv[0])))
        return cls(max_len, ordered, tuple(pads), algorithm, max_depth, dict(extra or {}))

    @property
    def num_packs(self) -> int:
        return sum(r for _, r in self.mixture)

    @property
    def deepest(self) -> int:
        return max((s.depth for s, _ in self.mixture), default=0)

    def packed_counts(self) -> np.ndarray:
        """Sequences per length (index ``i - 1``) placed by the mixture."""
        out = np.zeros(self.max_len, dtype=np.int64)
        for strategy, repeat in self.mixture:
            for length in strategy:
                out[length - 1] += repeat
        return out

    def padding_counts(self) -> np.ndarray:
        out = np.zeros(self.max_len, dtype=np.int64)
        for length, count in self.padding_sequences:
            out[length - 1] += count
        return out

    def implied_histogram(self) -> SequenceLengthHistogram:
        """The real-sequence histogram this solution covers (packed minus padding)."""
        return SequenceLengthHistogram(self.max_len, self.packed_counts() - self.padding_counts())

    def check(self, hist: SequenceLengthHistogram, max_depth: int | None = None) -> None:
        """Raise if the solution is not a valid packing of ``hist``."""
        if hist.max_len != self.max_len:
            raise HistpackError(
                f"solution max_len {self.max_len} != histogram max_len {hist.max_len}"
            )
        for strategy, _ in self.mixture:
            if strategy.total > self.max_len:
                raise HistpackError(f"strategy {list(strategy)} exceeds max_len {self.max_len}")
            if max_depth is not None and strategy.depth > max_depth:
                raise HistpackError(f"strategy {list(strategy)} exceeds depth {max_depth}")
        expected = hist.counts + self.padding_counts()
        got = self.packed_counts()
        mismatch = np.flatnonzero(expected != got)
        if mismatch.size:
            i = int(mismatch[0])
            raise CoverageError(i + 1, int(expected[i]), int(got[i]))

    def to_json_dict(self) -> dict:
        data = {
            "max_len": self.max_len,
            "algorithm": self.algorithm,
            "max_depth": self.max_depth,
            "mixture": [{"strategy": list(s), "repeat": r} for s, r in self.mixture],
            "padding_sequences": [{"length": l, "count": c} for l, c in self.padding_sequences],
        }
        data.update(self.extra)
        return data

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_json_dict(), indent=indent)

    @classmethod
    def from_json_dict(cls, data: dict) -> "PackingSolution":
        try:
            known = {"max_len", "algorithm", "max_depth", "mixture", "padding_sequences"}
            return cls.from_counts(
                int(data["max_len"]),
                [(m["strategy"], int(m["repeat"])) for m in data["mixture"]],
                {int(p["length"]): int(p["count"]) for p in data.get("padding_sequences", [])},
                algorithm=data.get("algorithm", "none"),
                max_depth=data.get("max_depth"),
                extra={k: v for k, v in data.items() if k not in known},
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise HistpackError(f"malformed packing solution: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "PackingSolution":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise HistpackError(f"packing solution is not valid JSON: {exc}") from exc
        return cls.from_json_dict(data)


def unpacked_baseline(hist: SequenceLengthHistogram) -> PackingSolution:
    """Depth-1 baseline: every sequence in its own pack."""
    return PackingSolution.from_counts(
        hist.max_len, {Strategy([l]): c for l, c in hist.nonzero().items()}, max_depth=1
    )
