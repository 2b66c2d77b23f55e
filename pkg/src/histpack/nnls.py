"""Lawson-Hanson active-set solver for ``min ||Ax - b||_2`` subject to ``x >= 0``.

The packing matrices are tall-and-wide but very sparse (at most a handful of
nonzeros per column) while the passive set stays small, so gradients use
sparse products and only the passive columns are ever densified.
"""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceError
from .sparse import CscMatrix


def _as_csc(A) -> CscMatrix:
    if isinstance(A, CscMatrix):
        return A
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise ValueError("A must be two-dimensional")
    return CscMatrix.from_dense(A)


def _passive_lstsq(Ap: np.ndarray, b: np.ndarray) -> np.ndarray:
    if Ap.shape[1] <= Ap.shape[0]:
        q, r = np.linalg.qr(Ap)
        diag = np.abs(np.diag(r))
        if diag.min() > 1e-10 * diag.max():
            return np.linalg.solve(r, q.T @ b)
    # rank deficient (or wide): fall back to the SVD solver
    return np.linalg.lstsq(Ap, b, rcond=None)[0]


def lawson_hanson(A, b, tolerance: float = 1e-8, max_iterations: int | None = None):
    """Solve the NNLS problem and return ``(x, iterations)``.

    ``tolerance`` bounds the KKT violation relative to ``max(1, max|b|)``:
    on return every zero entry has ``-(A^T(Ax - b))_j <= tol`` and every
    positive entry is a least-squares solution on the passive set.
    ``max_iterations`` (default ``3 * ncols``) counts least-squares solves;
    exceeding it raises :class:`ConvergenceError` carrying the best iterate.
    """
    A = _as_csc(A)
    m, n = A.shape
    b = np.asarray(b, dtype=float)
    if b.shape != (m,):
        raise ValueError(f"b has shape {b.shape}, expected ({m},)")
    if n < 1:
        raise ValueError("A must have at least one column")
    if not tolerance > 0:
        raise ValueError("tolerance must be positive")
    if max_iterations is None:
        max_iterations = 3 * n

    scale = max(1.0, float(np.max(np.abs(b), initial=0.0)))
    tol = tolerance * scale

    x = np.zeros(n)
    passive: list[int] = []
    columns: dict[int, np.ndarray] = {}
    blocked = np.zeros(n, dtype=bool)  # degenerate picks, cleared whenever x moves
    w = A.rmatvec(b)
    iterations = 0

    def fail():
        resid = float(np.linalg.norm(A.matvec(x) - b))
        raise ConvergenceError(
            f"NNLS did not converge within {max_iterations} iterations", x.copy(), resid
        )

    while True:
        candidates = np.where(blocked, -np.inf, w)
        candidates[passive] = -np.inf
        j = int(np.argmax(candidates))
        if candidates[j] <= tol:
            break
        passive.append(j)
        columns[j] = A.dense_column(j)

        first_pass = True
        while True:
            iterations += 1
            if iterations > max_iterations:
                fail()
            z = _passive_lstsq(np.column_stack([columns[k] for k in passive]), b)
            if np.all(z > 0):
                x[:] = 0.0
                x[passive] = z
                blocked[:] = False
                break
            if first_pass and z[-1] <= 0:
                # w_j > tol but the column does not help: numerically degenerate
                passive.pop()
                del columns[j]
                blocked[j] = True
                break
            first_pass = False
            xp = x[passive]
            neg = z <= 0
            # an entry already at zero allows no step at all (and avoids 0/0)
            gap = xp[neg] - z[neg]
            alpha = np.min(np.divide(xp[neg], gap, out=np.zeros_like(gap), where=xp[neg] > 0))
            xp = xp + alpha * (z - xp)
            # the entry that hit the bound leaves exactly; others that are ~0 too
            drop = neg & (xp <= 1e-12 * max(1.0, float(np.max(xp, initial=0.0))))
            drop[np.argmin(np.where(neg, xp, np.inf))] = True
            keep = [k for k, d in zip(passive, drop) if not d]
            for k, d in zip(passive, drop):
                if d:
                    del columns[k]
            x[:] = 0.0
            x[keep] = xp[~drop]
            passive = keep
            blocked[:] = False
            if not passive:
                break
        w = A.rmatvec(b - A.matvec(x))

    return x, iterations


def nnls_solve(A, b, tolerance: float = 1e-8, max_iterations: int | None = None) -> np.ndarray:
    """Non-negative least squares; see :func:`lawson_hanson`."""
    return lawson_hanson(A, b, tolerance, max_iterations)[0]
