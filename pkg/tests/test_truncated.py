import itertools
from fractions import Fraction

import pytest

from fouriermoments.errors import BudgetError, ParameterError
from fouriermoments.limits import delta_partition
from fouriermoments.truncated import (
    _HISTOGRAM_CACHE,
    alpha,
    base_condition,
    beta,
    c_from_d,
    count_d,
    counting_condition,
    d42_closed,
    i_tuple_probability,
    solution_set,
)

from helpers import counter_condition


def test_counting_condition_trivial_families():
    # equal i indices, constant a, or constant b always satisfy the condition
    for a in itertools.product(range(3), repeat=3):
        for b in itertools.product(range(2), repeat=3):
            assert counting_condition((1, 1), a, b, 3, 2)
    for i in itertools.product(range(3), repeat=2):
        assert counting_condition(i, (2, 2, 2), (0, 1, 1), 3, 2)
        assert counting_condition(i, (0, 2, 1), (1, 1, 1), 3, 2)


def test_counting_condition_hand_example():
    assert not counting_condition((0, 1), (0, 1), (0, 1), 2, 2)


def test_counting_condition_matches_counter_oracle():
    for M, N in ((2, 2), (2, 3), (3, 2)):
        for i in itertools.product(range(M), repeat=2):
            for a in itertools.product(range(M), repeat=2):
                for b in itertools.product(range(N), repeat=2):
                    assert counting_condition(i, a, b, M, N) == \
                        counter_condition(i, a, b, M, N)


def test_counting_condition_validation():
    with pytest.raises(ParameterError):
        counting_condition((0,), (0, 1), (0,), 2, 2)
    with pytest.raises(ParameterError):
        counting_condition((), (0,), (0,), 2, 2)


def test_count_d_trivial_values():
    for M, N, p, r in itertools.product(range(1, 4), repeat=4):
        if M == 1 or N == 1 or p == 1 or r == 1:
            assert count_d(M, N, p, r) == 1


def test_count_d_matches_literal_enumeration():
    for M, N, p, r in itertools.product((2, 3), (2,), (2, 3), (2, 3)):
        hits = 0
        for i in itertools.product(range(M), repeat=r):
            for a in itertools.product(range(M), repeat=p):
                for b in itertools.product(range(N), repeat=p):
                    hits += counting_condition(i, a, b, M, N)
        assert count_d(M, N, p, r) == Fraction(hits, M**(p + r) * N**p)


def test_count_d_agrees_with_i_tuple_average():
    M, N, p = 2, 2, 2
    for r in (1, 2, 3):
        total = sum(i_tuple_probability(a, b, M, N, r)
                    for a in itertools.product(range(M), repeat=p)
                    for b in itertools.product(range(N), repeat=p))
        assert count_d(M, N, p, r) == total / (M * N)**p


def test_count_d_thread_invariance():
    _HISTOGRAM_CACHE.clear()
    serial = count_d(3, 3, 4, 2)
    _HISTOGRAM_CACHE.clear()
    threaded = count_d(3, 3, 4, 2, threads=2)
    assert serial == threaded


def test_count_d_budget_guard():
    with pytest.raises(BudgetError) as info:
        count_d(4, 4, 6, 6)
    assert info.value.estimated_ops == 4**12 * 4**6


def test_c_from_d():
    assert c_from_d(Fraction(1), 2, 2, 3) == 16
    assert c_from_d(Fraction(3, 4), 5, 7, 1) == Fraction(3, 4)
    for M, N, r in itertools.product((1, 2, 3), (1, 2, 3), (1, 2)):
        assert c_from_d(count_d(M, N, 1, r), M, N, 1) == 1


def test_alpha_closed_form():
    for N, p, r in itertools.product((1, 2, 5), (1, 3), (1, 4)):
        assert alpha(1, N, p, r) == 1
    for M, N, p in itertools.product((2, 3), (2, 3), (2, 4)):
        assert alpha(M, N, p, 1) == 1
    for M, N, r in itertools.product(range(1, 5), range(1, 5), range(1, 5)):
        assert alpha(M, N, 2, r) == count_d(M, N, 2, r)


def test_beta_closed_form():
    for M, N, p in itertools.product((2, 4), (2, 3), (2, 5)):
        assert beta(M, N, p, 1, delta_partition(M, N, p)) == 1
    for M, N, r in itertools.product(range(1, 4), range(1, 4), range(1, 5)):
        assert beta(M, N, 3, r, delta_partition(M, N, 3)) == count_d(M, N, 3, r)


def test_beta_dominates_alpha():
    for M, N, p, r in itertools.product(range(1, 5), range(1, 5), range(1, 6), range(1, 5)):
        assert beta(M, N, p, r, delta_partition(M, N, p)) >= alpha(M, N, p, r)


def test_ordering_chain_on_grid():
    # 0 <= alpha <= beta <= d <= 1 and d >= delta, exact comparisons
    for M, N, p in itertools.product(range(1, 5), range(1, 5), range(1, 6)):
        delta = delta_partition(M, N, p)
        for r in range(1, 5):
            d = count_d(M, N, p, r)
            a = alpha(M, N, p, r)
            b = beta(M, N, p, r, delta)
            assert 0 <= a <= b <= d <= 1, (M, N, p, r)
            assert d >= delta


def test_beta_gap_decay():
    # at M = N = 2, p = 4 the excess over the closed-form bound dies like 2^(1-r)
    delta = delta_partition(2, 2, 4)
    for r in range(2, 9):
        gap = count_d(2, 2, 4, r) - beta(2, 2, 4, r, delta)
        assert 0 <= gap <= Fraction(1, 2**(r - 1))


def test_d42_closed_form():
    for N in (1, 2, 3, 5):
        assert d42_closed(3, N) == beta(3, N, 4, 2, delta_partition(3, N, 4))
        assert d42_closed(2, N) == beta(2, N, 4, 2, delta_partition(2, N, 4))
    for M, N in itertools.product((2, 3, 4), (2, 3)):
        assert d42_closed(M, N) == count_d(M, N, 4, 2)


def test_base_condition_and_solution_set():
    assert base_condition((0, 0), (1, 1))
    assert not base_condition((0, 1), (0, 1))
    # constant a makes every shift a solution
    assert solution_set((1, 1, 1), (0, 2, 1), 4, 3) == set(range(4))
    for M, N, p in itertools.product((1, 2, 3, 4), (1, 2, 3, 4), (1, 2, 3, 4)):
        for a in itertools.product(range(M), repeat=p):
            for b in itertools.product(range(N), repeat=p):
                shifts = solution_set(a, b, M, N)
                assert 0 in shifts
                assert (len(shifts) == M) == base_condition(a, b)


def test_i_tuple_probability_bounds():
    for M, N in ((2, 2), (2, 3)):
        for p in (2, 3):
            for a in itertools.product(range(M), repeat=p):
                for b in itertools.product(range(N), repeat=p):
                    shifts = solution_set(a, b, M, N)
                    for r in (1, 2, 3):
                        value = i_tuple_probability(a, b, M, N, r)
                        if base_condition(a, b):
                            assert value == 1
                        else:
                            assert value <= Fraction(len(shifts), M)**(r - 1)
                            assert value == Fraction(1, M**(r - 1))


def test_i_tuple_probability_budget():
    with pytest.raises(BudgetError):
        i_tuple_probability((0, 1), (0, 1), 10, 2, 12, budget=100)


def test_parameter_validation():
    with pytest.raises(ParameterError):
        count_d(0, 2, 2, 2)
    with pytest.raises(ParameterError):
        count_d(2, 2, 0, 2)
    with pytest.raises(ParameterError):
        count_d(2, 2, 2, 0)
    with pytest.raises(ParameterError):
        alpha(2, 2, 2, -1)
