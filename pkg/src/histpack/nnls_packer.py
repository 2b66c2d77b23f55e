"""Least-squares histogram packing (NNLSHP) and its padding-weighted extension.

The histogram ``b`` is approximated by a non-negative mixture ``x`` of the
enumerated strategies (columns of the packing matrix ``A``). After rounding,
``r = b - A round(x)`` says which lengths were over-subscribed (``r < 0``,
realised with explicit padding sequences) and which were left over
(``r > 0``, packed separately).
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import EmptyHistogramError
from .heuristics import spfhp
from .histogram import SequenceLengthHistogram
from .nnls import lawson_hanson
from .solution import PackingSolution
from .sparse import CscMatrix
from .strategy import PackingMatrix, Strategy, build_packing_matrix, enumerate_strategies

SHORT_LENGTH = 8
SHORT_WEIGHT = 0.09
LEFTOVER_MODES = ("single", "spfhp")


@dataclass(frozen=True)
class NnlsReport:
    raw_solution: np.ndarray
    rounded_mixture: np.ndarray
    residual: np.ndarray
    padding_tokens_added: int
    unpacked_sequences: int
    iterations: int
    solve_seconds: float
    strategies_available: int

    def to_json_dict(self) -> dict:
        return {
            "raw_solution": [float(v) for v in self.raw_solution],
            "rounded_mixture": [int(v) for v in self.rounded_mixture],
            "residual": [int(v) for v in self.residual],
            "padding_tokens_added": self.padding_tokens_added,
            "unpacked_sequences": self.unpacked_sequences,
            "iterations": self.iterations,
            "solve_seconds": self.solve_seconds,
            "strategies_available": self.strategies_available,
        }


def default_weights(max_len: int) -> np.ndarray:
    """Row weights: 0.09 for lengths 1..8 (cheap to pad), 1.0 above."""
    w = np.ones(max_len)
    w[: min(SHORT_LENGTH, max_len)] = SHORT_WEIGHT
    return w


def compute_residual(A: CscMatrix, mixture, b) -> np.ndarray:
    """``b - A @ mixture`` in exact integer arithmetic."""
    mixture = np.asarray(mixture)
    b = np.asarray(b)
    if mixture.shape != (A.shape[1],) or b.shape != (A.shape[0],):
        raise ValueError(
            f"dimension mismatch: A is {A.shape}, mixture {mixture.shape}, b {b.shape}"
        )
    if not (np.issubdtype(mixture.dtype, np.integer) and np.issubdtype(b.dtype, np.integer)):
        raise TypeError("residuals are computed on integer mixtures and histograms only")
    data = A.data.astype(np.int64)
    exact = CscMatrix(A.shape, A.indptr, A.indices, data)
    return b.astype(np.int64) - exact.matvec(mixture.astype(np.int64))


def _check_weights(weights, max_len: int) -> np.ndarray:
    w = np.asarray(weights, dtype=float)
    if w.shape != (max_len,):
        raise ValueError(f"expected {max_len} weights, got shape {w.shape}")
    if not np.all(w > 0):
        raise ValueError("weights must be strictly positive")
    return w


def _round(x: np.ndarray, round_up: bool) -> np.ndarray:
    if round_up:
        # ignore float noise so that a 1e-15 solve artefact is not a pack
        return np.ceil(x - 1e-9).clip(min=0).astype(np.int64)
    return np.rint(x).astype(np.int64)  # half to even


def _finish(
    hist: SequenceLengthHistogram,
    A: PackingMatrix,
    x_hat: np.ndarray,
    *,
    algorithm: str,
    max_depth: int,
    round_up: bool,
    leftover: str,
    iterations: int,
    seconds: float,
) -> tuple[PackingSolution, NnlsReport]:
    if leftover not in LEFTOVER_MODES:
        raise ValueError(f"leftover must be one of {LEFTOVER_MODES}, got {leftover!r}")
    rounded = _round(x_hat, round_up)
    residual = compute_residual(A, rounded, hist.counts)
    lengths = hist.lengths

    mixture: dict[Strategy, int] = {}
    for j in np.flatnonzero(rounded):
        mixture[A.strategy_set[j]] = int(rounded[j])
    padding = {int(i): int(-r) for i, r in zip(lengths, residual) if r < 0}
    surplus = np.where(residual > 0, residual, 0)

    if leftover == "spfhp" and surplus.any():
        rest = spfhp(SequenceLengthHistogram(hist.max_len, surplus), max_depth)
        for strategy, repeat in rest.mixture:
            mixture[strategy] = mixture.get(strategy, 0) + repeat
    else:
        for i in np.flatnonzero(surplus):
            key = Strategy([int(i) + 1])
            mixture[key] = mixture.get(key, 0) + int(surplus[i])

    solution = PackingSolution.from_counts(
        hist.max_len, mixture, padding, algorithm=algorithm, max_depth=max_depth
    )
    report = NnlsReport(
        raw_solution=x_hat,
        rounded_mixture=rounded,
        residual=residual,
        padding_tokens_added=int(sum(l * c for l, c in padding.items())),
        unpacked_sequences=int(surplus.sum()),
        iterations=iterations,
        solve_seconds=seconds,
        strategies_available=A.shape[1],
    )
    return solution, report


@lru_cache(maxsize=8)
def _packing_matrix(max_len: int, max_depth: int, granularity: int) -> PackingMatrix:
    return build_packing_matrix(enumerate_strategies(max_len, max_depth, granularity))


def _prepare(hist: SequenceLengthHistogram, max_depth: int, granularity: int) -> PackingMatrix:
    if hist.total_sequences() == 0:
        raise EmptyHistogramError("no sequences to pack")
    return _packing_matrix(hist.max_len, max_depth, granularity)


def nnlshp(
    hist: SequenceLengthHistogram,
    max_depth: int = 3,
    weights=None,
    tolerance: float = 1e-8,
    max_iterations: int | None = None,
    *,
    leftover: str = "single",
    granularity: int = 1,
) -> tuple[PackingSolution, NnlsReport]:
    """Pack by solving the row-weighted NNLS problem ``w*A x ~ w*b`` and rounding.

    Leftover (positive residual) sequences get a pack of their own, or with
    ``leftover="spfhp"`` are packed by a second shortest-pack-first pass.
    """
    A = _prepare(hist, max_depth, granularity)
    w = default_weights(hist.max_len) if weights is None else _check_weights(weights, hist.max_len)
    start = time.perf_counter()
    x_hat, iterations = lawson_hanson(
        A.scale_rows(w), w * hist.counts, tolerance, max_iterations
    )
    seconds = time.perf_counter() - start
    return _finish(
        hist, A, x_hat, algorithm="nnlshp", max_depth=max_depth, round_up=False,
        leftover=leftover, iterations=iterations, seconds=seconds,
    )


def extended_system(A: CscMatrix, weights, large_weight: float) -> CscMatrix:
    """Row-weighted block matrix ``diag(w, wbar) [[A, 0], [A, -I]]``.

    The extra ``m`` columns are the slack ``rbar >= 0`` with
    ``A x - b - rbar ~ 0``, which drives ``A x >= b`` when ``wbar`` is large.
    """
    m, n = A.shape
    counts = np.diff(A.indptr)
    indptr = np.concatenate([2 * A.indptr, 2 * A.indptr[-1] + np.arange(1, m + 1)])
    indices = np.empty(2 * A.nnz + m, dtype=np.int64)
    data = np.empty(2 * A.nnz + m)
    # each original column: its rows in the top block followed by the bottom block
    pos = np.repeat(2 * A.indptr[:-1], counts) + (np.arange(A.nnz) - np.repeat(A.indptr[:-1], counts))
    offset = np.repeat(counts, counts)
    w = np.asarray(weights, dtype=float)
    indices[pos] = A.indices
    data[pos] = A.data * w[A.indices]
    indices[pos + offset] = A.indices + m
    data[pos + offset] = A.data * large_weight
    indices[2 * A.nnz:] = np.arange(m, 2 * m)
    data[2 * A.nnz:] = -large_weight
    return CscMatrix((2 * m, n + m), indptr, indices, data)


def ennlshp(
    hist: SequenceLengthHistogram,
    max_depth: int = 3,
    large_weight: float = 1e6,
    tolerance: float = 1e-8,
    max_iterations: int | None = None,
    *,
    round_up: bool = False,
    leftover: str = "single",
    granularity: int = 1,
) -> tuple[PackingSolution, NnlsReport]:
    """NNLS packing that weights residuals by tokens and penalises leftovers.

    Rows get weight ``w_i = i`` so squared padding tokens are minimised, and
    a slack block weighted by ``large_weight`` pushes ``A x - b`` to be
    non-negative (over-subscription, i.e. padding, instead of unpacked
    sequences). ``round_up=True`` rounds the mixture up instead of to nearest.
    """
    A = _prepare(hist, max_depth, granularity)
    m, n = A.shape
    w = hist.lengths.astype(float)
    system = extended_system(A, w, large_weight)
    b = hist.counts.astype(float)
    rhs = np.concatenate([w * b, large_weight * b])
    if max_iterations is None:
        max_iterations = 3 * (n + m)
    start = time.perf_counter()
    solution, iterations = lawson_hanson(system, rhs, tolerance, max_iterations)
    seconds = time.perf_counter() - start
    return _finish(
        hist, A, solution[:n], algorithm="ennlshp", max_depth=max_depth, round_up=round_up,
        leftover=leftover, iterations=iterations, seconds=seconds,
    )
