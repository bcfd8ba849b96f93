import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from innet.errors import ContractError, DegenerateDistributionError
from innet.metrics import accuracy, kde, rmse, silverman_bandwidth


def test_rmse_zero():
    a = np.arange(6.0).reshape(3, 2)
    assert rmse(a, a) == 0.0


def test_rmse_analytic():
    assert rmse([[0.0], [0.0]], [[3.0], [4.0]]) == pytest.approx(math.sqrt(12.5), abs=1e-12)
    assert rmse([[0.0], [0.0]], [[3.0], [4.0]]) == pytest.approx(3.53553, abs=1e-5)


def test_rmse_counts_outputs():
    assert rmse(np.zeros((1, 2)), [[3.0, 4.0]]) == pytest.approx(math.sqrt(12.5))


def test_rmse_shape_mismatch():
    with pytest.raises(ContractError):
        rmse(np.zeros((2, 1)), np.zeros((1, 2)))


@settings(max_examples=40, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 20), st.integers(1, 3)), elements=st.floats(-1e3, 1e3)),
       st.randoms(use_true_random=False))
def test_rmse_permutation_invariant(a, rnd):
    b = a[::-1] * 0.5 + 1.0
    perm = list(range(a.shape[0]))
    rnd.shuffle(perm)
    assert rmse(a[perm], b[perm]) == pytest.approx(rmse(a, b), rel=1e-12, abs=1e-12)
    assert rmse(a, b) >= 0


def test_accuracy_perfect_and_wrong():
    labels = np.eye(3)[[0, 1, 2, 1]]
    assert accuracy(labels, labels) == 1.0
    assert accuracy(np.eye(3)[[1, 2, 0, 0]], labels) == 0.0


def test_accuracy_hand_count():
    labels = np.eye(3)[[0, 1, 2, 1]]
    pred = np.array([[0.9, 0.1, 0.0], [0.2, 0.7, 0.1], [0.5, 0.1, 0.4], [0.0, 1.0, 0.0]])
    assert accuracy(pred, labels) == 0.75


def test_accuracy_tie_takes_lowest_index():
    assert accuracy([[0.5, 0.5]], [[1.0, 0.0]]) == 1.0


def test_accuracy_needs_two_columns():
    with pytest.raises(ContractError):
        accuracy(np.zeros((3, 1)), np.ones((3, 1)))


def test_kde_symmetric_pair():
    est = kde([-1.0, 1.0], grid_points=401)
    np.testing.assert_allclose(est.density, est.density[::-1], atol=1e-10)
    np.testing.assert_allclose(est.grid, -est.grid[::-1], atol=1e-12)


def test_kde_integral(rng):
    est = kde(rng.standard_normal(300) * 3 + 2)
    assert abs(est.integral() - 1) < 1e-3
    assert np.all(est.density >= 0)


def test_kde_standard_normal_peak(rng):
    est = kde(rng.standard_normal(1000))
    at_zero = np.interp(0.0, est.grid, est.density)
    assert abs(at_zero - 1 / math.sqrt(2 * math.pi)) < 0.1


def test_kde_matches_direct_sum(rng):
    x = rng.standard_normal(40)
    est = kde(x, grid_points=64)
    h = silverman_bandwidth(x)
    i = 17
    direct = sum(math.exp(-0.5 * ((est.grid[i] - v) / h) ** 2) for v in x) / (40 * h * math.sqrt(2 * math.pi))
    assert est.density[i] == pytest.approx(direct, rel=1e-12)


def test_silverman_formula():
    x = np.array([-1.0, 1.0])
    # std = sqrt(2), IQR = 1
    assert silverman_bandwidth(x) == pytest.approx(0.9 * (1 / 1.34) * 2 ** -0.2)


def test_kde_degenerate():
    with pytest.raises(DegenerateDistributionError):
        kde([2.0, 2.0, 2.0])
    with pytest.raises(DegenerateDistributionError):
        kde([1.0])
