import math

import numpy as np
import pytest
from hypothesis import given, settings as hyp_settings, strategies as st
from hypothesis.extra.numpy import arrays

import sys
from pathlib import Path
project_root_path = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root_path))

from models.discrete_ot import CostMatrix, assignment_min, brute_force_min, cost_matrix, empirical_w2
from models.elliptical import SampleSet
from models.errors import NonFinite, NotSquare, SizeMismatch, TooLarge


def test_cost_matrix_validation():
    with pytest.raises(NotSquare):
        CostMatrix(np.ones((2, 3)))
    with pytest.raises(NonFinite):
        CostMatrix([[0.0, np.nan], [1.0, 0.0]])
    with pytest.raises(ValueError):
        CostMatrix([[0.0, -1.0], [1.0, 0.0]])


def test_cost_matrix_is_squared_euclidean():
    cost = cost_matrix(np.array([[0.0, 0.0], [1.0, 1.0]]), np.array([[3.0, 4.0], [1.0, 1.0]]))
    np.testing.assert_array_equal(cost.entries, [[25.0, 2.0], [13.0, 0.0]])


def test_cost_matrix_size_mismatch():
    with pytest.raises(SizeMismatch):
        cost_matrix(np.zeros((3, 2)), np.zeros((4, 2)))


def test_assignment_small_example():
    cost = CostMatrix([[4.0, 1.0, 3.0], [2.0, 0.0, 5.0], [3.0, 2.0, 2.0]])
    result = assignment_min(cost)
    assert result.perm == (1, 0, 2)
    assert result.total_cost == 5.0
    assert brute_force_min(cost) == result


def test_assignment_identity_beats_swap():
    cost = CostMatrix([[1.0, 100.0], [100.0, 19.0]])
    result = assignment_min(cost)
    assert result.perm == (0, 1)
    assert result.total_cost == 20.0


def test_single_point():
    result = assignment_min(CostMatrix([[7.5]]))
    assert result.perm == (0,)
    assert result.total_cost == 7.5


def test_brute_force_tie_breaks_lexicographically():
    assert brute_force_min(CostMatrix(np.ones((3, 3)))).perm == (0, 1, 2)


def test_brute_force_size_cap():
    with pytest.raises(TooLarge):
        brute_force_min(CostMatrix(np.zeros((9, 9))))


@hyp_settings(deadline=None, max_examples=60)
@given(st.integers(min_value=2, max_value=7).flatmap(
    lambda n: arrays(np.float64, (n, n), elements=st.floats(min_value=0.0, max_value=100.0, allow_subnormal=False))))
def test_assignment_agrees_with_brute_force(entries):
    cost = CostMatrix(entries)
    assert assignment_min(cost).total_cost == pytest.approx(brute_force_min(cost).total_cost, rel=1e-12, abs=1e-12)


def test_empirical_w2_identical_sets_is_zero():
    points = np.random.default_rng(0).normal(size=(20, 2))
    assert empirical_w2(points, points[::-1]) == 0.0


def test_empirical_w2_translation():
    points = np.random.default_rng(1).normal(size=(15, 3))
    shift = np.array([3.0, 0.0, 4.0])
    assert empirical_w2(points, points + shift) == pytest.approx(5.0, abs=1e-12)


def test_empirical_w2_accepts_sample_sets():
    x = SampleSet(rows=[[0.0], [1.0]])
    y = SampleSet(rows=[[2.0], [3.0]])
    assert empirical_w2(x, y) == pytest.approx(2.0)


def test_empirical_w2_caps():
    with pytest.raises(TooLarge):
        empirical_w2(np.zeros((5, 1)), np.ones((5, 1)), max_n=4)
    with pytest.raises(TooLarge):
        empirical_w2(np.zeros((2049, 1)), np.ones((2049, 1)), max_n=4096)
    with pytest.raises(SizeMismatch):
        empirical_w2(np.zeros((5, 1)), np.ones((6, 1)))


def test_empirical_w2_metric_properties():
    rng = np.random.default_rng(2)
    x, y, z = (rng.normal(size=(12, 2)) * s for s in (1.0, 2.0, 0.5))
    xy = empirical_w2(x, y)
    assert xy == pytest.approx(empirical_w2(y, x), abs=1e-12)
    assert empirical_w2(x, z) <= xy + empirical_w2(y, z) + 1e-9
    assert empirical_w2(x[rng.permutation(12)], y) == pytest.approx(xy, abs=1e-12)
    assert math.isfinite(xy) and xy > 0.0
