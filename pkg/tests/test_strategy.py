import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from histpack.errors import DepthLimitError
from histpack.exact_oracle import count_exact_partitions
from histpack.strategy import (
    Strategy,
    StrategySet,
    build_packing_matrix,
    closed_form_strategy_count,
    enumerate_strategies,
)

# rows are lengths 1..8, columns in lexicographic strategy order
LENGTH_8_MATRIX = np.array([
    [2, 1, 1, 1, 0, 0, 0, 0, 0, 0],
    [0, 1, 0, 0, 2, 1, 1, 0, 0, 0],
    [0, 0, 1, 0, 0, 2, 0, 1, 0, 0],
    [0, 0, 1, 0, 1, 0, 0, 0, 2, 0],
    [0, 1, 0, 0, 0, 0, 0, 1, 0, 0],
    [1, 0, 0, 0, 0, 0, 1, 0, 0, 0],
    [0, 0, 0, 1, 0, 0, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 1],
])


def test_strategy_is_canonical():
    assert Strategy([184, 95, 233]) == Strategy([95, 184, 233])
    assert Strategy([3, 1]).depth == 2
    assert Strategy([3, 1]).implicit_padding(8) == 4
    with pytest.raises(ValueError):
        Strategy([6, 4]).implicit_padding(8)


def test_length_8_depth_3_order():
    got = [list(s) for s in enumerate_strategies(8, 3)]
    assert got == [[8], [1, 7], [2, 6], [3, 5], [4, 4],
                   [1, 1, 6], [1, 2, 5], [1, 3, 4], [2, 2, 4], [2, 3, 3]]


def test_depth_one():
    assert [list(s) for s in enumerate_strategies(512, 1)] == [[512]]


def test_depth_above_four_is_refused():
    with pytest.raises(DepthLimitError):
        enumerate_strategies(64, 5)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 60), st.integers(1, 4))
def test_count_matches_partition_oracle(max_len, depth):
    strategies = enumerate_strategies(max_len, depth)
    assert len(strategies) == count_exact_partitions(max_len, depth)
    assert len(set(strategies)) == len(strategies)
    assert all(s.total == max_len and s.depth <= depth for s in strategies)


def test_closed_form_counts():
    assert round(closed_form_strategy_count(512, 3)) == 21845
    # the exact count for exactly three parts, on top of depths one and two
    assert 22102 - 256 - 1 == 21845
    assert closed_form_strategy_count(512, 2) == 256
    assert closed_form_strategy_count(512, 4) == pytest.approx(940_266.7, abs=0.1)


def test_packing_matrix_columns():
    A = build_packing_matrix(enumerate_strategies(8, 3))
    dense = A.toarray()
    j = list(A.strategy_set).index(Strategy([1, 1, 6]))
    assert dense[:, j].tolist() == [2, 0, 0, 0, 0, 1, 0, 0]
    single = build_packing_matrix(enumerate_strategies(512, 1)).toarray()
    assert single[511, 0] == 1 and single.sum() == 1


def test_length_8_matrix_matches_reference_table():
    A = build_packing_matrix(enumerate_strategies(8, 3))
    order = sorted(range(len(A.strategy_set)), key=lambda j: tuple(A.strategy_set[j]))
    assert np.array_equal(A.toarray()[:, order], LENGTH_8_MATRIX)


def test_matrix_column_invariants():
    A = build_packing_matrix(enumerate_strategies(40, 4))
    dense = A.toarray()
    assert np.all(np.arange(1, 41) @ dense == 40)
    assert np.all(dense.sum(axis=0) <= 4)


def test_granularity_keeps_only_multiples():
    strategies = enumerate_strategies(16, 3, granularity=4)
    assert all(length % 4 == 0 for s in strategies for length in s)
    assert [list(s) for s in strategies][:3] == [[16], [4, 12], [8, 8]]


def test_strategy_set_json_round_trip():
    strategies = enumerate_strategies(12, 3)
    assert list(StrategySet.from_json(strategies.to_json())) == list(strategies)
