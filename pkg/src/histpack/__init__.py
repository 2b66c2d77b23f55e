"""Histogram-based sequence packing for fixed-length training batches."""

from .errors import (
    ConvergenceError,
    CoverageError,
    DepthLimitError,
    EmptyHistogramError,
    HistpackError,
    InvalidLengthError,
    LengthFileError,
    OracleLimitError,
)
from .heuristics import lpfhp, spfhp
from .histogram import (
    SequenceLengthHistogram,
    build_histogram,
    bundled_histogram,
    load_lengths_file,
    read_histogram,
    synthetic_skewed_histogram,
    theoretical_speedup,
)
from .metrics import PackingStats, evaluate, format_report, realized_speedup
from .nnls import lawson_hanson, nnls_solve
from .nnls_packer import ennlshp, nnlshp
from .solution import PackingSolution, unpacked_baseline
from .strategy import Strategy, build_packing_matrix, enumerate_strategies

__all__ = [
    "ConvergenceError", "CoverageError", "DepthLimitError", "EmptyHistogramError",
    "HistpackError", "InvalidLengthError", "LengthFileError", "OracleLimitError",
    "PackingSolution", "PackingStats", "SequenceLengthHistogram", "Strategy",
    "build_histogram", "build_packing_matrix", "bundled_histogram", "ennlshp",
    "enumerate_strategies", "evaluate", "format_report", "lawson_hanson", "load_lengths_file",
    "lpfhp", "nnls_solve", "nnlshp", "read_histogram", "realized_speedup", "spfhp",
    "synthetic_skewed_histogram", "theoretical_speedup", "unpacked_baseline",
]
