"""Sequence-length histograms: ingestion, synthetic data and serialization.

Every packer in this package consumes a :class:`SequenceLengthHistogram`
rather than individual samples, so packing cost depends on the maximum
sequence length and not on the dataset size.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np

from .errors import EmptyHistogramError, HistpackError, InvalidLengthError, LengthFileError

_CHUNK = 1 << 16


@dataclass(frozen=True, eq=False)
class SequenceLengthHistogram:
    """Counts of sequences per exact length 1..max_len.

    ``counts[i - 1]`` is the number of sequences of length ``i``. The array is
    made read-only on construction; use ``hist[i]`` for 1-based access.
    """

    max_len: int
    counts: np.ndarray

    def __post_init__(self):
        if int(self.max_len) < 1:
            raise ValueError(f"max_len must be positive, got {self.max_len}")
        counts = np.array(self.counts, dtype=np.int64).reshape(-1)
        if counts.shape[0] != self.max_len:
            raise ValueError(
                f"counts has {counts.shape[0]} entries, expected max_len={self.max_len}"
            )
        if (counts < 0).any():
            bad = int(np.flatnonzero(counts < 0)[0]) + 1
            raise ValueError(f"negative count at length {bad}")
        counts.setflags(write=False)
        object.__setattr__(self, "max_len", int(self.max_len))
        object.__setattr__(self, "counts", counts)

    @classmethod
    def zeros(cls, max_len: int) -> "SequenceLengthHistogram":
        return cls(max_len, np.zeros(max_len, dtype=np.int64))

    @classmethod
    def from_mapping(cls, mapping: dict[int, int], max_len: int) -> "SequenceLengthHistogram":
        counts = np.zeros(max_len, dtype=np.int64)
        for length, count in mapping.items():
            if not 1 <= length <= max_len:
                raise InvalidLengthError(length, "mapping", max_len)
            counts[length - 1] += count
        return cls(max_len, counts)

    def __getitem__(self, length: int) -> int:
        if not 1 <= length <= self.max_len:
            raise IndexError(f"length {length} outside 1..{self.max_len}")
        return int(self.counts[length - 1])

    def __eq__(self, other):
        if not isinstance(other, SequenceLengthHistogram):
            return NotImplemented
        return self.max_len == other.max_len and np.array_equal(self.counts, other.counts)

    def __hash__(self):
        return hash((self.max_len, self.counts.tobytes()))

    @property
    def lengths(self) -> np.ndarray:
        """The length axis ``[1, 2, ..., max_len]``."""
        return np.arange(1, self.max_len + 1, dtype=np.int64)

    def total_sequences(self) -> int:
        return int(self.counts.sum())

    def total_tokens(self) -> int:
        return int(np.dot(self.lengths, self.counts))

    def nonzero(self) -> dict[int, int]:
        """Sparse view ``{length: count}`` of the nonzero bins."""
        return {int(i) + 1: int(self.counts[i]) for i in np.flatnonzero(self.counts)}

    def to_json_dict(self) -> dict:
        return {"max_len": self.max_len, "counts": [int(c) for c in self.counts]}

    def __repr__(self):
        return (
            f"SequenceLengthHistogram(max_len={self.max_len}, "
            f"sequences={self.total_sequences()}, tokens={self.total_tokens()})"
        )


def build_histogram(lengths: Iterable[int], max_len: int) -> SequenceLengthHistogram:
    """Count sequence lengths in a single streaming pass.

    Raises :class:`InvalidLengthError` naming the first value outside
    ``1..max_len`` and its zero-based position in the input.
    """
    if max_len < 1:
        raise ValueError(f"max_len must be positive, got {max_len}")
    counts = np.zeros(max_len + 1, dtype=np.int64)
    if isinstance(lengths, np.ndarray):
        chunks: Iterable[np.ndarray] = [lengths.reshape(-1)]
    else:
        chunks = _array_chunks(iter(lengths))
    offset = 0
    for chunk in chunks:
        bad = (chunk < 1) | (chunk > max_len)
        if bad.any():
            pos = int(np.flatnonzero(bad)[0])
            raise InvalidLengthError(int(chunk[pos]), offset + pos, max_len)
        counts += np.bincount(chunk, minlength=max_len + 1)
        offset += chunk.shape[0]
    return SequenceLengthHistogram(max_len, counts[1:])


def _array_chunks(it: Iterator[int]) -> Iterator[np.ndarray]:
    while True:
        block = list(itertools.islice(it, _CHUNK))
        if not block:
            return
        try:
            yield np.array(block, dtype=np.int64)
        except OverflowError:
            for pos, value in enumerate(block):
                if not -(2**63) <= value < 2**63:
                    raise InvalidLengthError(value, pos) from None
            raise


def load_lengths_file(path: str | os.PathLike, fmt: str = "text") -> Iterator[int]:
    """Stream sequence lengths from ``path``.

    ``fmt="text"`` reads one base-10 integer per line (a trailing newline is
    fine); ``fmt="u32"`` reads a raw little-endian uint32 stream.
    """
    if fmt == "text":
        return _iter_text(Path(path))
    if fmt == "u32":
        return _iter_u32(Path(path))
    raise ValueError(f"unknown length-file format {fmt!r} (expected 'text' or 'u32')")


def _iter_text(path: Path) -> Iterator[int]:
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise HistpackError(f"{path}: {exc.strerror or exc}") from exc
    with fh:
        blank_at = None
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text:
                if blank_at is None:
                    blank_at = lineno
                continue
            if blank_at is not None:
                raise LengthFileError(path, blank_at, "")
            try:
                yield int(text, 10)
            except ValueError:
                raise LengthFileError(path, lineno, text) from None


def _iter_u32(path: Path) -> Iterator[int]:
    try:
        fh = open(path, "rb")
    except OSError as exc:
        raise HistpackError(f"{path}: {exc.strerror or exc}") from exc
    with fh:
        offset = 0
        while True:
            buf = fh.read(4 * _CHUNK)
            if not buf:
                return
            if len(buf) % 4:
                # a short read may still be followed by more bytes
                rest = fh.read(4 - len(buf) % 4)
                buf += rest
                if len(buf) % 4:
                    raise HistpackError(
                        f"{path}: truncated u32 stream ({offset + len(buf)} bytes is not a "
                        "multiple of 4)"
                    )
            values = np.frombuffer(buf, dtype="<u4")
            offset += len(buf)
            yield from values.tolist()


def synthetic_skewed_histogram(
    max_len: int,
    total_sequences: int,
    peak_fraction_at_max: float,
    seed: int,
    shape: tuple[float, float] = (2.0, 3.8),
) -> SequenceLengthHistogram:
    """Seeded, positively skewed length histogram with a spike at ``max_len``.

    ``round(peak_fraction_at_max * total_sequences)`` sequences sit at
    ``max_len``; the rest are drawn multinomially from a discretised
    Beta(``shape``) density over ``1..max_len-1``. The total is exact.
    """
    if not 0.0 <= peak_fraction_at_max <= 1.0:
        raise ValueError(f"peak_fraction_at_max must lie in [0, 1], got {peak_fraction_at_max}")
    if total_sequences < 0:
        raise ValueError("total_sequences must be non-negative")
    counts = np.zeros(max_len, dtype=np.int64)
    if total_sequences == 0:
        return SequenceLengthHistogram(max_len, counts)
    peak = int(round(peak_fraction_at_max * total_sequences))
    rest = total_sequences - peak
    if max_len == 1:
        counts[0] = total_sequences
        return SequenceLengthHistogram(max_len, counts)
    a, b = shape
    x = (np.arange(1, max_len) - 0.5) / (max_len - 1)
    density = x ** (a - 1.0) * (1.0 - x) ** (b - 1.0)
    rng = np.random.default_rng(seed)
    counts[:-1] = rng.multinomial(rest, density / density.sum())
    counts[-1] = peak
    return SequenceLengthHistogram(max_len, counts)


def theoretical_speedup(hist: SequenceLengthHistogram) -> float:
    """Padded tokens over real tokens: the speed-up of dropping all padding."""
    n = hist.total_sequences()
    if n == 0:
        raise EmptyHistogramError("no sequences")
    return n * hist.max_len / hist.total_tokens()


def coarsen_even(hist: SequenceLengthHistogram) -> SequenceLengthHistogram:
    """Round odd lengths up to the next even length (``max_len`` itself stays).

    Opt-in transform that halves the row count of the packing matrix.
    """
    counts = hist.counts.copy()
    odd = np.arange(0, hist.max_len - 1, 2)  # 0-based index of lengths 1, 3, 5, ...
    counts[odd + 1] += counts[odd]
    counts[odd] = 0
    return SequenceLengthHistogram(hist.max_len, counts)


# -- serialization -----------------------------------------------------------

def histogram_to_csv(hist: SequenceLengthHistogram) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["length", "count"])
    for length, count in zip(range(1, hist.max_len + 1), hist.counts.tolist()):
        writer.writerow([length, count])
    return buf.getvalue()


def histogram_to_json(hist: SequenceLengthHistogram) -> str:
    return json.dumps(hist.to_json_dict())


def parse_histogram(text: str) -> SequenceLengthHistogram:
    """Parse either the CSV (``length,count``) or the JSON histogram format."""
    stripped = text.lstrip()
    if stripped.startswith("{"):
        data = json.loads(stripped)
        try:
            return SequenceLengthHistogram(int(data["max_len"]), data["counts"])
        except (KeyError, TypeError) as exc:
            raise HistpackError(f"malformed histogram JSON: {exc}") from exc
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or [c.strip() for c in rows[0]] != ["length", "count"]:
        raise HistpackError("histogram CSV must start with header 'length,count'")
    body = [r for r in rows[1:] if r]
    try:
        pairs = [(int(r[0]), int(r[1])) for r in body]
    except (ValueError, IndexError) as exc:
        raise HistpackError(f"malformed histogram CSV row: {exc}") from exc
    lengths = [p[0] for p in pairs]
    if lengths != list(range(1, len(pairs) + 1)):
        raise HistpackError("histogram CSV must list every length 1..max_len in order")
    if not pairs:
        raise HistpackError("histogram CSV has no rows")
    return SequenceLengthHistogram(len(pairs), [p[1] for p in pairs])


def read_histogram(path: str | os.PathLike) -> SequenceLengthHistogram:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise HistpackError(f"{path}: {exc.strerror or exc}") from exc
    return parse_histogram(text)


def bundled_histogram() -> SequenceLengthHistogram:
    """The committed seeded synthetic histogram (max_len 512, skewed towards short lengths)."""
    from importlib import resources

    text = resources.files("histpack").joinpath("data/skewed_512.csv").read_text()
    return parse_histogram(text)
