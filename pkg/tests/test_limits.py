import itertools
import math
import warnings
from fractions import Fraction

import pytest

from fouriermoments.errors import BudgetError, ParameterError
from fouriermoments.limits import (
    _squared_multinomial_dp,
    _squared_multinomial_sum,
    decompose,
    delta_direct,
    delta_exact,
    delta_m2,
    delta_m2_float,
    delta_partition,
    delta_upper_bound,
    epsilon,
    moment_integral,
)

from helpers import counter_delta, counter_delta_back_shift


def test_delta_small_values():
    assert delta_direct(5, 3, 1) == 1
    assert delta_direct(2, 2, 3) == Fraction(5, 8)
    for M, N in itertools.product(range(1, 5), range(1, 5)):
        assert delta_direct(M, N, 2) == Fraction(M + N - 1, M * N)


def test_delta_direct_matches_counter_oracle():
    for M, N, p in itertools.product((1, 2, 3), (1, 2, 3), (1, 2, 3, 4)):
        assert delta_direct(M, N, p) == counter_delta(M, N, p)


def test_shifted_condition_forms_agree():
    # forward pairing (a_y, b_{y+1}) and backward pairing (a_y, b_{y-1})
    # produce identical counts
    for M, N, p in itertools.product((2, 3), (2, 3), (2, 3, 4)):
        assert counter_delta(M, N, p) == counter_delta_back_shift(M, N, p)
        assert delta_direct(M, N, p) == counter_delta_back_shift(M, N, p)


def test_delta_partition_agrees_with_direct():
    for M, N, p in itertools.product(range(1, 5), range(1, 5), range(1, 5)):
        assert delta_partition(M, N, p) == delta_direct(M, N, p)


def test_delta_partition_cap():
    with pytest.raises(ParameterError):
        delta_partition(2, 2, 10)


def test_delta_direct_budget():
    with pytest.raises(BudgetError):
        delta_direct(4, 4, 9)


def test_epsilon_values():
    assert epsilon(3, 2, 2) == Fraction(1, 3)
    for p in range(1, 6):
        for t in range(1, p + 1):
            assert epsilon(p, 1, t) == 1
    for p in range(2, 7):
        for s, t in itertools.product(range(1, p + 1), repeat=2):
            assert epsilon(p, s, t) == epsilon(p, t, s)


def test_epsilon_validation():
    with pytest.raises(ParameterError):
        epsilon(3, 4, 1)
    with pytest.raises(ParameterError):
        epsilon(10, 2, 2)


def test_decompose_identities():
    for M, N, p in ((2, 3, 2), (3, 4, 3), (4, 2, 4), (3, 3, 5), (2, 2, 4)):
        report = decompose(M, N, p)
        assert report.total == delta_partition(M, N, p)
        assert report.row_sum(1) == Fraction(1, M**(p - 1))
        assert report.column_sum(1) == Fraction(1, N**(p - 1))
        assert report.contributions[(1, 1)] == Fraction(1, (M * N)**(p - 1))
        assert all(report.epsilon[(1, t)] == 1 for t in range(1, min(p, N) + 1))
        head = Fraction(1, M**(p - 1)) + Fraction(1, N**(p - 1)) - Fraction(1, (M * N)**(p - 1))
        tail = sum((v for (s, t), v in report.contributions.items()
                    if s >= 2 and t >= 2), Fraction(0))
        assert report.total == head + tail


def test_moment_integral_values():
    assert moment_integral(3, 0) == 1
    assert moment_integral(1, 7) == 1
    assert moment_integral(2, 1) == Fraction(1, 2)
    for k in range(65):
        assert moment_integral(2, k) == Fraction(math.comb(2 * k, k), 4**k)


def test_moment_integral_paths_agree():
    # composition scan and dynamic program compute the same big integers
    for N in (3, 4):
        for k in range(9):
            scan = _squared_multinomial_sum(N, k)
            assert scan == _squared_multinomial_dp(N, k)[k]
            assert moment_integral(N, k) == Fraction(scan, N**(2 * k))


def test_moment_integral_budget():
    with pytest.raises(BudgetError):
        moment_integral(6, 10**6, budget=10**6)


def test_delta_m2_values():
    assert delta_m2(2, 2) == Fraction(1, 2) * (1 + Fraction(1, 2)) == Fraction(3, 4)
    for p in range(1, 9):
        assert delta_m2(1, p) == 1
    for N, p in itertools.product(range(1, 5), range(1, 7)):
        assert delta_m2(N, p) == delta_direct(2, N, p)


def test_delta_m2_float_accuracy():
    for N in (1, 2, 3):
        for p in (1, 2, 3, 7, 20, 50, 200):
            exact = float(delta_m2(N, p))
            approx = delta_m2_float(N, p)
            assert abs(approx - exact) <= 1e-9 * exact, (N, p)


def test_delta_m2_float_monotone_observation():
    # monitored observation only; warn instead of failing if it ever breaks
    values = [delta_m2_float(2, p) for p in range(4, 1001)]
    if not all(a > b for a, b in zip(values, values[1:])):
        warnings.warn("two-row limiting moments not monotone on the scanned range")


def test_delta_upper_bound():
    for M, N in itertools.product((2, 3, 4), repeat=2):
        for p in range(2, 7):
            assert delta_partition(M, N, p) <= delta_upper_bound(M, N, p)
    with pytest.raises(ParameterError):
        delta_upper_bound(1, 2, 3)
    with pytest.raises(ParameterError):
        delta_upper_bound(2, 2, 1)


def test_delta_monotone_in_p_observation():
    for M, N in itertools.product((2, 3, 4), repeat=2):
        values = [delta_partition(M, N, p) for p in range(1, 7)]
        if not all(a >= b for a, b in zip(values, values[1:])):
            warnings.warn(f"limiting moments increased in p at {(M, N)}")


def test_delta_exact_routes():
    assert delta_exact(3, 3, 4) == delta_direct(3, 3, 4)
    # beyond the pair-scan cap, falls back to direct enumeration
    assert delta_exact(2, 2, 10) == delta_m2(2, 10)
    # two-row route used when enumeration is out of budget
    assert delta_exact(2, 2, 40, budget=10**6) == delta_m2(2, 40)
    assert delta_exact(3, 2, 40, budget=10**6) == delta_m2(3, 40)
    with pytest.raises(BudgetError):
        delta_exact(3, 3, 40, budget=10**6)
