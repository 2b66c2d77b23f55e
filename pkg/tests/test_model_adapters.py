import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from histpack.model_adapters import (
    adjust_lamb_betas,
    build_attention_mask,
    lamb_equivalence_check,
    unpack_per_sequence_loss,
    validate_composition,
)


def test_block_mask():
    zero_one, additive = build_attention_mask([1, 1, 1, 2, 2])
    assert zero_one.tolist() == [
        [1, 1, 1, 0, 0],
        [1, 1, 1, 0, 0],
        [1, 1, 1, 0, 0],
        [0, 0, 0, 1, 1],
        [0, 0, 0, 1, 1],
    ]
    assert np.array_equal(additive == 0, zero_one == 1)
    assert set(additive.ravel().tolist()) == {0.0, -1000.0}


def test_single_sequence_and_padding():
    assert build_attention_mask([1, 1, 1, 1])[0].tolist() == [[1] * 4] * 4
    assert build_attention_mask([1, 0])[0].tolist() == [[1, 0], [0, 0]]
    assert np.isneginf(build_attention_mask([1, 0], blocked=-np.inf)[1][1, 1])


def test_bad_compositions():
    for comp in ([2, 1], [1, 2, 1], [-1, 1]):
        with pytest.raises(ValueError):
            validate_composition(comp)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(1, 6), min_size=1, max_size=5), st.integers(0, 4))
def test_mask_is_block_diagonal(sizes, pad):
    ids = np.concatenate([np.full(s, k + 1) for k, s in enumerate(sizes)] + [np.zeros(pad, int)])
    mask, _ = build_attention_mask(ids)
    assert np.array_equal(mask, mask.T)
    assert mask.sum() == sum(s * s for s in sizes)


def test_hand_worked_loss():
    per_seq, pack_loss = unpack_per_sequence_loss([1.0, 3.0, 4.0, 9.0], [1, 1, 2, 0], 2)
    assert per_seq.tolist() == [2.0, 4.0]
    assert pack_loss == 3.0


def test_single_sequence_loss_is_plain_mean():
    nll = np.random.default_rng(1).uniform(0, 5, 13)
    _, pack_loss = unpack_per_sequence_loss(nll, np.ones(13, dtype=int), 1)
    assert abs(pack_loss - nll.mean()) <= 1e-12


def test_sequences_weigh_equally():
    for a, b in ((1.0, 100.0), (7.0, 0.5)):
        assert unpack_per_sequence_loss([a, b], [1, 2], 2)[1] == (a + b) / 2


def test_batched_loss_averages_over_present_sequences():
    nll = np.array([[1.0, 3.0, 5.0], [2.0, 2.0, 0.0]])
    ids = np.array([[1, 2, 2], [1, 1, 0]])
    per_seq, pack_loss = unpack_per_sequence_loss(nll, ids, 2)
    assert per_seq.tolist() == [[1.0, 4.0], [2.0, 0.0]]
    assert pack_loss == pytest.approx((1.0 + 4.0 + 2.0) / 3)


def test_lamb_adjustment():
    assert adjust_lamb_betas(0.81, 0.99, 2) == pytest.approx((0.6561, 0.9801))
    assert adjust_lamb_betas(0.9, 0.999, 1) == (0.9, 0.999)
    assert adjust_lamb_betas(0.9, 0.999, 2) == pytest.approx((0.81, 0.998001))
    with pytest.raises(ValueError):
        adjust_lamb_betas(1.0, 0.9, 2)


def test_lamb_equivalence_by_hand():
    g = np.array([1.0, -2.0])
    (m, _), (m_packed, _), diff = lamb_equivalence_check(0.81, 0.99, 2, g, np.zeros(2), np.zeros(2))
    assert np.allclose(m, (1 - 0.6561) * g, rtol=1e-14)
    assert np.allclose(m_packed, m, rtol=1e-14)
    assert diff < 1e-15
    assert lamb_equivalence_check(0.9, 0.99, 1, g, g, g * g)[2] == 0.0


def test_lamb_equivalence_random_three_steps():
    rng = np.random.default_rng(2)
    g, m0 = rng.standard_normal((2, 8))
    (m, _), _, diff = lamb_equivalence_check(0.85, 0.97, 3, g, m0, np.abs(m0))
    assert diff <= 1e-12 * np.linalg.norm(m)
