import math

import numpy as np
import pytest

from psrsched.metrics import delay_quantile, jain_index, loss_ratio
from psrsched.objective import InvalidInputError


def test_quantile_examples():
    # rank ceil(0.999 * 1000) = 999
    assert delay_quantile(np.arange(1, 1001), 0.999) == 999
    assert delay_quantile(np.arange(1, 1002), 0.999) == 1000
    assert delay_quantile([4.2] * 37, 0.5) == 4.2
    assert delay_quantile([4.2] * 37, 0.999) == 4.2
    assert delay_quantile([1.0] * 99 + [math.inf], 0.999) == math.inf


def test_quantile_nearest_rank(rng):
    for n in (1, 7, 100, 1234):
        x = rng.random(n)
        for q in (0.01, 0.5, 0.9, 0.999):
            k = math.ceil(round(q * n, 9))
            assert delay_quantile(x, q) == np.sort(x)[max(k, 1) - 1]
    # q * n lands on an integer in exact arithmetic
    assert delay_quantile(np.arange(1, 101), 0.07) == 7


def test_quantile_errors():
    with pytest.raises(InvalidInputError):
        delay_quantile([], 0.5)
    for q in (0, 1, -0.1, 1.5):
        with pytest.raises(InvalidInputError):
            delay_quantile([1, 2], q)


def test_loss_ratio():
    assert loss_ratio([1, 2, 3], 20) == 0
    assert loss_ratio([1, 30, 2, 40], 20) == 0.5
    assert loss_ratio([0.1, 2, 5], 0) == 1
    assert loss_ratio([1, math.inf], 20) == 0.5
    assert loss_ratio([20.0], 20) == 0
    with pytest.raises(InvalidInputError):
        loss_ratio([], 20)


def test_jain():
    assert jain_index([3, 3, 3]) == pytest.approx(1)
    assert jain_index([1, 0]) == 0.5
    x = np.array([1.0, 2.0, 5.0])
    assert jain_index(7.3 * x) == pytest.approx(jain_index(x))
    assert 0 < jain_index([1, 0, 0, 0]) <= 1
    for bad in ([0, 0], [], [1, -1]):
        with pytest.raises(InvalidInputError):
            jain_index(bad)


def test_quantile_consistent_with_loss_ratio(rng):
    # the Q-quantile is within the bound exactly when the loss ratio is at most 1 - Q
    for _ in range(200):
        x = rng.exponential(5.0, size=rng.integers(1, 3000))
        bound = float(rng.choice(x))
        assert (delay_quantile(x, 0.99) <= bound) == (loss_ratio(x, bound) <= 0.01 + 1e-12)
