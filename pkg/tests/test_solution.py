import pytest

from histpack.errors import CoverageError, HistpackError
from histpack.histogram import SequenceLengthHistogram
from histpack.solution import PackingSolution, unpacked_baseline
from histpack.strategy import Strategy


def test_from_counts_merges_and_sorts():
    solution = PackingSolution.from_counts(8, [((6, 1, 1), 2), ((8,), 1), ((1, 1, 6), 1), ((4, 4), 0)])
    assert solution.mixture == ((Strategy([8]), 1), (Strategy([1, 1, 6]), 3))
    assert solution.num_packs == 4
    assert solution.deepest == 3


def test_json_round_trip_keeps_extras():
    solution = PackingSolution.from_counts(
        8, {(2, 6): 3}, padding={2: 1}, algorithm="nnlshp", max_depth=3,
        extra={"overhead_fraction": 0.04},
    )
    again = PackingSolution.from_json(solution.to_json())
    assert again == solution
    assert again.extra == {"overhead_fraction": 0.04}
    assert again.implied_histogram().nonzero() == {2: 2, 6: 3}


def test_check_rejects_bad_solutions():
    hist = SequenceLengthHistogram.from_mapping({3: 2}, 8)
    with pytest.raises(CoverageError):
        PackingSolution.from_counts(8, {(3, 3): 2}).check(hist)
    with pytest.raises(HistpackError):
        PackingSolution.from_counts(8, {(3, 3): 1}).check(hist, max_depth=1)
    with pytest.raises(HistpackError):
        PackingSolution.from_counts(4, {(3,): 2}).check(hist)
    with pytest.raises(HistpackError):
        PackingSolution.from_json('{"max_len": 8}')


def test_unpacked_baseline():
    hist = SequenceLengthHistogram.from_mapping({2: 3, 5: 1}, 8)
    baseline = unpacked_baseline(hist)
    baseline.check(hist, 1)
    assert baseline.num_packs == 4
