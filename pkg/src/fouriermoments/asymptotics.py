"""Free-probability limit objects and asymptotic-regime checks: block-count
generating polynomials of the non-crossing lattice, free Poisson moments,
the proportional M = t*N regime, and the large-argument decay estimates.

Estimates are evaluated in log space so that N^N and (pi*p)^(N-1) survive
large arguments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import ParameterError
from .limits import delta_exact
from .partitions import ENUMERATION_CAP, _narayana_profile
from .truncated import _validate_pos


@dataclass(frozen=True)
class StirlingPolynomial:
    """Block-count profile of the non-crossing partitions of {0,...,p-1}:
    coefficient k is the number of such partitions with k blocks."""

    p: int
    coefficients: tuple[int, ...]  # index k = 1..p; coefficients[0] unused

    def __call__(self, t: Fraction | int) -> Fraction:
        t = Fraction(t)
        return sum((self.coefficients[k] * t**k for k in range(1, self.p + 1)),
                   Fraction(0))

    def catalan_total(self) -> int:
        return sum(self.coefficients[1:])


def stirling_polynomial(p: int) -> StirlingPolynomial:
    """Exact block-count profile of the non-crossing partitions."""
    _validate_pos(p=p)
    if p > ENUMERATION_CAP:
        raise ParameterError(f"p={p} exceeds the enumeration cap {ENUMERATION_CAP}")
    return StirlingPolynomial(p, tuple(_narayana_profile(p)))


def free_poisson_moment(t: Fraction | int, p: int) -> Fraction:
    """p-th moment of the free Poisson (Marchenko-Pastur) law of parameter
    t: the block-count polynomial of the non-crossing lattice at t."""
    t = Fraction(t)
    if t <= 0:
        raise ParameterError(f"t must be positive, got {t}")
    return stirling_polynomial(p)(t)


@dataclass(frozen=True)
class RegimeRow:
    N: int
    M: int
    p: int
    delta: Fraction
    predicted: Fraction  # S_p(t) * M^-p * N
    rel_error: float
    char_moment: Fraction  # M^(p-1) * delta / N, the p-th moment of chi/N
    char_predicted: Fraction  # S_p(t) / M


@dataclass(frozen=True)
class RegimeReport:
    t: Fraction
    p: int
    rows: tuple[RegimeRow, ...]


def regime_check(t: Fraction | int, p: int, N_values: list[int]) -> RegimeReport:
    """Exact limiting moments along M = t*N versus the proportional-regime
    prediction S_p(t) * M^-p * N, with relative errors tabulated; also
    tabulates the chi/N moment M^(p-1) delta / N against S_p(t) / M."""
    t = Fraction(t)
    _validate_pos(p=p)
    moment = free_poisson_moment(t, p)
    rows = []
    for N in N_values:
        _validate_pos(N=N)
        M_exact = t * N
        if M_exact.denominator != 1 or M_exact < 1:
            raise ParameterError(f"t*N = {M_exact} is not a positive integer")
        M = int(M_exact)
        delta = delta_exact(M, N, p)
        predicted = moment * Fraction(N, M**p)
        rel = float(abs(delta - predicted) / predicted)
        rows.append(RegimeRow(
            N=N, M=M, p=p, delta=delta, predicted=predicted, rel_error=rel,
            char_moment=Fraction(M**(p - 1), N) * delta,
            char_predicted=moment / M))
    return RegimeReport(t=t, p=p, rows=tuple(rows))


def richmond_shallit(N: int, k: int) -> float:
    """Large-k estimate sqrt(N^N / (4 pi k)^(N-1)) of the normalized 2k-th
    moment of |q_1 + ... + q_N| / N."""
    _validate_pos(N=N)
    if N == 1:
        return 1.0
    _validate_pos(k=k)
    return math.exp(0.5 * (N * math.log(N) - (N - 1) * math.log(4 * math.pi * k)))


def delta_decay_estimate(N: int, p: int) -> float:
    """Large-p estimate sqrt(N^N / (pi p)^(N-1)) of the two-row limiting
    moment delta_p(2, N); at N = 2 this is 2 / sqrt(pi p)."""
    _validate_pos(N=N)
    if N == 1:
        return 1.0
    _validate_pos(p=p)
    return math.exp(0.5 * (N * math.log(N) - (N - 1) * math.log(math.pi * p)))
