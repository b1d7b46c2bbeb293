import math

import pytest

from heavytail._sums import exp_power_sum


def brute(c, s, a, b):
    return math.fsum(math.exp(c * k) * k ** (-s) for k in range(a, b + 1))


@pytest.mark.parametrize(
    "c,s,a,b",
    [(0.0, 2.0, 1, 100), (0.001, 1.5, 1, 50_000), (1e-4, 0.5, 10, 100_000), (-0.01, 3.0, 5, 30_000), (0.0, 1.0, 1, 200_000)],
)
def test_matches_direct_sum(c, s, a, b):
    assert exp_power_sum(c, s, a, b) == pytest.approx(brute(c, s, a, b), rel=1e-12)


def test_empty_range_is_zero():
    assert exp_power_sum(0.1, 2.0, 10, 9) == 0.0
