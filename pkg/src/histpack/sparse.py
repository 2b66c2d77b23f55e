"""Minimal column-compressed sparse matrix used by the packing matrix and NNLS."""

from __future__ import annotations

import numpy as np


class CscMatrix:
    """Compressed sparse column matrix.

    Column ``j`` holds rows ``indices[indptr[j]:indptr[j+1]]`` with values
    ``data[indptr[j]:indptr[j+1]]``. Products use ``np.bincount`` so they are
    deterministic (fixed summation order) and need no scipy.
    """

    def __init__(self, shape, indptr, indices, data):
        self.shape = (int(shape[0]), int(shape[1]))
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.data = np.asarray(data)
        if self.indptr.shape != (self.shape[1] + 1,):
            raise ValueError("indptr must have ncols + 1 entries")
        if self.indices.shape != self.data.shape or self.indices.shape[0] != self.indptr[-1]:
            raise ValueError("indices/data length must equal indptr[-1]")
        if self.indices.size and (self.indices.min() < 0 or self.indices.max() >= self.shape[0]):
            raise ValueError("row index out of range")
        # column id of every stored entry, used by both products
        self._cols = np.repeat(np.arange(self.shape[1]), np.diff(self.indptr))

    @classmethod
    def from_dense(cls, dense) -> "CscMatrix":
        dense = np.asarray(dense)
        if dense.ndim != 2:
            raise ValueError("expected a 2-D array")
        cols, rows = np.nonzero(dense.T)  # column-major walk
        indptr = np.zeros(dense.shape[1] + 1, dtype=np.int64)
        np.add.at(indptr, cols + 1, 1)
        return cls(dense.shape, np.cumsum(indptr), rows, dense[rows, cols])

    @property
    def nnz(self) -> int:
        return int(self.indptr[-1])

    def matvec(self, x) -> np.ndarray:
        x = np.asarray(x)
        if x.shape != (self.shape[1],):
            raise ValueError(f"expected vector of length {self.shape[1]}, got {x.shape}")
        if np.issubdtype(self.data.dtype, np.integer) and np.issubdtype(x.dtype, np.integer):
            out = np.zeros(self.shape[0], dtype=np.int64)
            np.add.at(out, self.indices, self.data * x[self._cols])
            return out
        return np.bincount(
            self.indices, weights=self.data * x[self._cols], minlength=self.shape[0]
        )

    def rmatvec(self, y) -> np.ndarray:
        """``A.T @ y``."""
        y = np.asarray(y)
        if y.shape != (self.shape[0],):
            raise ValueError(f"expected vector of length {self.shape[0]}, got {y.shape}")
        return np.bincount(self._cols, weights=self.data * y[self.indices], minlength=self.shape[1])

    def column(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[j], self.indptr[j + 1]
        return self.indices[lo:hi], self.data[lo:hi]

    def dense_column(self, j: int) -> np.ndarray:
        out = np.zeros(self.shape[0], dtype=float)
        rows, vals = self.column(j)
        out[rows] = vals
        return out

    def scale_rows(self, weights) -> "CscMatrix":
        weights = np.asarray(weights, dtype=float)
        if weights.shape != (self.shape[0],):
            raise ValueError("row weights must match the row count")
        return CscMatrix(self.shape, self.indptr, self.indices, self.data * weights[self.indices])

    def toarray(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=self.data.dtype if self.data.size else float)
        out[self.indices, self._cols] = self.data
        return out

    def __repr__(self):
        return f"CscMatrix(shape={self.shape}, nnz={self.nnz})"
