import math

import numpy as np
import pytest

from histpack.errors import ConvergenceError
from histpack.scaling_sim import (
    EULER_GAMMA,
    GumbelParams,
    expected_cluster_speedup,
    fit_single_device,
    gumbel_cdf,
    gumbel_sf,
    nelder_mead,
    sample_cluster_speedup,
    speedup_curve,
)

OBSERVED = GumbelParams(1.6038, 0.1288)


@pytest.fixture(scope="module")
def single():
    return fit_single_device(OBSERVED, 8)


def test_cdf_landmarks():
    p = GumbelParams(2.0, 0.3)
    assert gumbel_cdf(p, 2.0) == pytest.approx(math.exp(-1))
    assert gumbel_cdf(p, p.median) == pytest.approx(0.5)
    assert gumbel_cdf(p, 1e6) == 1.0
    assert gumbel_cdf(p, 1.0) + gumbel_sf(p, 1.0) == pytest.approx(1.0)


def test_nelder_mead_on_rosenbrock():
    x, value, _ = nelder_mead(lambda v: (1 - v[0]) ** 2 + 100 * (v[1] - v[0] ** 2) ** 2, [-1.2, 1.0])
    assert np.allclose(x, [1.0, 1.0], atol=1e-6)
    assert value < 1e-12
    with pytest.raises(ConvergenceError):
        nelder_mead(lambda v: float(np.sum(v**2)), [3.0, 4.0], max_iterations=3)


def test_fit_is_a_root_of_both_equations(single):
    # the minimum of eight single-device draws must have the observed median and mode
    sf8 = lambda s: float(gumbel_sf(single, s)) ** 8
    assert 1 - sf8(OBSERVED.median) == pytest.approx(0.5, abs=1e-9)
    assert 1 - sf8(OBSERVED.alpha) == pytest.approx(math.exp(-1), abs=1e-9)


def test_fit_agrees_with_scipy_root_finder(single):
    from scipy.optimize import fsolve

    def equations(v):
        p = GumbelParams(v[0], abs(v[1]))
        return [
            0.5 - float(gumbel_sf(p, OBSERVED.median)) ** 8,
            1 - math.exp(-1) - float(gumbel_sf(p, OBSERVED.alpha)) ** 8,
        ]

    root = fsolve(equations, [OBSERVED.alpha, OBSERVED.beta], xtol=1e-13)
    assert single.alpha == pytest.approx(root[0], abs=1e-6)
    assert single.beta == pytest.approx(abs(root[1]), abs=1e-6)


def test_single_device_fit_is_identity_for_one():
    assert fit_single_device(OBSERVED, 1) is OBSERVED


def test_round_trip_recovers_observed_params(single):
    draws = sample_cluster_speedup(single, 8, 10**6, np.random.default_rng(1))
    # a Gumbel has cdf(alpha) = 1/e, so alpha and the median pin down beta
    alpha = float(np.quantile(draws, math.exp(-1)))
    beta = (float(np.median(draws)) - alpha) / -math.log(math.log(2))
    assert alpha == pytest.approx(OBSERVED.alpha, rel=0.02)
    assert beta == pytest.approx(OBSERVED.beta, rel=0.02)


def test_single_device_mean():
    params = GumbelParams(1.94, 0.3)
    mean, stderr = expected_cluster_speedup(params, 1, 10**6, seed=3)
    assert abs(mean - (params.alpha + EULER_GAMMA * params.beta)) <= 3 * stderr


def test_inverse_and_direct_sampling_agree(single):
    inverse, s1 = expected_cluster_speedup(single, 8, 200_000, seed=4)
    direct, s2 = expected_cluster_speedup(single, 8, 200_000, seed=5, method="direct")
    assert abs(inverse - direct) <= 4 * math.hypot(s1, s2)


def test_curve_is_monotone_with_constant_packing_column(single):
    rows = speedup_curve(single, [1, 2, 8, 32, 2048], 1.913, 200_000, seed=0)
    unpadding = [u for _, u, _ in rows]
    assert unpadding == sorted(unpadding, reverse=True)
    assert {p for _, _, p in rows} == {1.913}


def test_unpadding_on_one_device_beats_packing(single):
    mean, _ = expected_cluster_speedup(single, 1, 10**6, seed=0)
    assert mean > 1.913


def test_argument_checks():
    with pytest.raises(ValueError):
        GumbelParams(1.0, 0.0)
    with pytest.raises(ValueError):
        fit_single_device(OBSERVED, 0)
    with pytest.raises(ValueError):
        sample_cluster_speedup(OBSERVED, 2, 10, np.random.default_rng(0), method="magic")
    with pytest.raises(ValueError):
        speedup_curve(OBSERVED, [], 1.9)
