"""Un-padding throughput versus cluster size under a Gumbel speed-up model.

A cluster of ``n`` devices runs at the pace of its slowest device, so the
cluster speed-up is the minimum of ``n`` per-device speed-ups and
``sf_n(s) = sf_1(s) ** n``. Given Gumbel parameters observed on ``n``
devices we recover the single-device distribution by matching the median
and the mode, then simulate arbitrary cluster sizes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ConvergenceError

EULER_GAMMA = 0.5772156649015329


@dataclass(frozen=True)
class GumbelParams:
    alpha: float  # location
    beta: float  # scale

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"Gumbel scale must be positive, got {self.beta}")

    @property
    def median(self) -> float:
        return self.alpha - self.beta * math.log(math.log(2.0))

    @property
    def mean(self) -> float:
        return self.alpha + EULER_GAMMA * self.beta


def gumbel_cdf(params: GumbelParams, s):
    z = (np.asarray(s, dtype=float) - params.alpha) / params.beta
    return np.exp(-np.exp(-z))


def gumbel_sf(params: GumbelParams, s):
    z = (np.asarray(s, dtype=float) - params.alpha) / params.beta
    return -np.expm1(-np.exp(-z))


def nelder_mead(
    f: Callable[[np.ndarray], float],
    x0: Sequence[float],
    *,
    max_iterations: int = 10_000,
    xtol: float = 1e-12,
    initial_step: float = 0.05,
) -> tuple[np.ndarray, float, int]:
    """Minimise ``f`` with the Nelder-Mead simplex method.

    Stops once the simplex diameter drops below ``xtol``; raises
    :class:`ConvergenceError` after ``max_iterations``.
    """
    x0 = np.asarray(x0, dtype=float)
    dim = x0.size
    simplex = [x0]
    for i in range(dim):
        point = x0.copy()
        point[i] = point[i] * (1 + initial_step) if point[i] != 0 else 0.00025
        simplex.append(point)
    simplex = np.array(simplex)
    values = np.array([f(p) for p in simplex])

    for iteration in range(1, max_iterations + 1):
        order = np.argsort(values, kind="stable")
        simplex, values = simplex[order], values[order]
        diameter = max(np.max(np.abs(p - simplex[0])) for p in simplex[1:])
        if diameter < xtol:
            return simplex[0], float(values[0]), iteration

        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]
        reflected = centroid + (centroid - worst)
        fr = f(reflected)
        if fr < values[0]:
            expanded = centroid + 2.0 * (centroid - worst)
            fe = f(expanded)
            simplex[-1], values[-1] = (expanded, fe) if fe < fr else (reflected, fr)
        elif fr < values[-2]:
            simplex[-1], values[-1] = reflected, fr
        else:
            if fr < values[-1]:
                contracted = centroid + 0.5 * (reflected - centroid)
            else:
                contracted = centroid + 0.5 * (worst - centroid)
            fc = f(contracted)
            if fc < min(fr, values[-1]):
                simplex[-1], values[-1] = contracted, fc
            else:
                simplex[1:] = simplex[0] + 0.5 * (simplex[1:] - simplex[0])
                values[1:] = [f(p) for p in simplex[1:]]

    best = int(np.argmin(values))
    raise ConvergenceError(
        f"Nelder-Mead did not converge in {max_iterations} iterations",
        simplex[best].copy(),
        float(values[best]),
    )


def fit_residual(candidate: GumbelParams, observed: GumbelParams, n_devices: int) -> float:
    """Squared error of the median and mode equations for a single-device fit."""
    median_eq = 0.5 - float(gumbel_sf(candidate, observed.median)) ** n_devices
    mode_eq = (1.0 - math.exp(-1.0)) - float(gumbel_sf(candidate, observed.alpha)) ** n_devices
    return median_eq**2 + mode_eq**2


def fit_single_device(params_n: GumbelParams, n_devices: int, **kwargs) -> GumbelParams:
    """Single-device Gumbel parameters whose min-of-``n_devices`` matches ``params_n``.

    Matches the median and the mode of the observed distribution. The
    simplex search starts at ``params_n``.
    """
    if n_devices < 1:
        raise ValueError("n_devices must be >= 1")
    if n_devices == 1:
        return params_n

    def objective(x):
        if x[1] <= 0:
            return math.inf
        return fit_residual(GumbelParams(x[0], x[1]), params_n, n_devices)

    x, value, _ = nelder_mead(objective, [params_n.alpha, params_n.beta], **kwargs)
    if value > 1e-10:
        raise ConvergenceError("Gumbel fit did not reach a root of the equations", x, value)
    return GumbelParams(float(x[0]), float(x[1]))


def sample_cluster_speedup(
    params_1: GumbelParams, n_devices: int, n_samples: int, rng: np.random.Generator,
    method: str = "inverse",
) -> np.ndarray:
    """Draws of the minimum speed-up over ``n_devices`` i.i.d. devices.

    ``"inverse"`` inverts the exact cdf of the minimum, ``1 - (1 - F)**n``,
    so the cost does not grow with ``n_devices``; ``"direct"`` takes the
    minimum over explicit Gumbel draws.
    """
    if n_samples < 1 or n_devices < 1:
        raise ValueError("n_samples and n_devices must be >= 1")
    if method == "direct":
        draws = rng.gumbel(params_1.alpha, params_1.beta, size=(n_samples, n_devices))
        return draws.min(axis=1)
    if method != "inverse":
        raise ValueError(f"unknown sampling method {method!r}")
    u = rng.random(n_samples)
    # single-device cdf value at the sampled minimum
    p = -np.expm1(np.log1p(-u) / n_devices)
    p = np.clip(p, np.finfo(float).tiny, 1.0 - np.finfo(float).epsneg)
    return params_1.alpha - params_1.beta * np.log(-np.log(p))


def expected_cluster_speedup(
    params_1: GumbelParams, n_devices: int, n_samples: int = 1_000_000, seed: int = 0,
    method: str = "inverse",
) -> tuple[float, float]:
    """Monte-Carlo mean of the cluster speed-up and its standard error."""
    draws = sample_cluster_speedup(
        params_1, n_devices, n_samples, np.random.default_rng(seed), method
    )
    stderr = float(draws.std(ddof=1) / math.sqrt(n_samples)) if n_samples > 1 else math.inf
    return float(draws.mean()), stderr


def speedup_curve(
    params_1: GumbelParams,
    device_counts: Sequence[int],
    packing_speedup_constant: float,
    n_samples: int = 1_000_000,
    seed: int = 0,
) -> list[tuple[int, float, float]]:
    """Rows ``(n_devices, unpadding_speedup, packing_speedup)``.

    Every cluster size reuses the same uniforms (common random numbers), so
    the estimates are exactly non-increasing in the device count.
    """
    if not device_counts:
        raise ValueError("device_counts must not be empty")
    rows = []
    for n in device_counts:
        mean, _ = expected_cluster_speedup(params_1, int(n), n_samples, seed)
        rows.append((int(n), mean, float(packing_speedup_constant)))
    return rows
