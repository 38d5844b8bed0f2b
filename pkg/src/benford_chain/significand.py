"""Significands, decimal digits, the Benford distribution and goodness-of-fit statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptySample, LeadingZero, ZeroInput

DIGIT_GUARD = 1e-9
CHI2_DOF = 8
CHI2_CRITICAL = {0.05: 15.507, 0.01: 20.090}
DIGITS = tuple(range(1, 10))


def significand_from_log(log10_abs: float) -> float:
    """10**frac(log10_abs), frac taken in [0, 1)."""
    f = log10_abs - math.floor(log10_abs)
    if f >= 1.0:  # floor of a tiny negative number
        f = 0.0
    return 10.0 ** f


def significand(x: float) -> float:
    """S(x) in [1, 10) with |x| = 10**k * S(x).

    The scaling by 10**k is done in exact rational arithmetic and rounded
    once, so S(S(x)) == S(x) holds bit-for-bit.
    """
    if x == 0:
        raise ZeroInput("the significand of 0 is undefined")
    if isinstance(x, float) and not math.isfinite(x):
        raise ValueError(f"non-finite input {x!r}")
    a = abs(Fraction(x))
    # digit-count estimate, off by at most one; valid beyond the float range
    k = len(str(a.numerator)) - len(str(a.denominator))
    s = a / Fraction(10) ** k
    while s >= 10:
        s /= 10
        k += 1
    while s < 1:
        s *= 10
        k -= 1
    out = float(s)
    return 9.999999999999998 if out >= 10.0 else out


def nth_digit(x: float, n: int) -> int:
    """n-th significant decimal digit D_n(x); D_n(0) = 0.

    A 1e-9 relative guard is added before truncation so that binary images
    of decimals (3.0122 is stored as 3.01219999...) report their decimal digits.
    """
    if n < 1:
        raise ValueError("digit position starts at 1")
    if x == 0:
        return 0
    s = significand(x)
    scaled = Fraction(s) * 10 ** (n - 1) * (1 + Fraction(DIGIT_GUARD))
    top = math.floor(scaled)
    if top >= 10 ** n:  # guard pushed 9.99.. across the decade
        top = 10 ** (n - 1)
    return top % 10


def first_digits_from_logs(log10_abs: np.ndarray) -> np.ndarray:
    """D_1 for each value given log10|x|; NaN entries (zeros) map to 0."""
    L = np.asarray(log10_abs, dtype=float)
    out = np.zeros(L.shape, dtype=np.int64)
    ok = np.isfinite(L)
    f = L[ok] - np.floor(L[ok])
    s = 10.0 ** f * (1.0 + DIGIT_GUARD)
    d = np.floor(s).astype(np.int64)
    d[d >= 10] = 1
    out[ok] = d
    return out


def first_digits_from_fraction(frac: np.ndarray) -> np.ndarray:
    """D_1 from frac(log10|x|) already reduced to [0, 1)."""
    s = 10.0 ** np.asarray(frac, dtype=float) * (1.0 + DIGIT_GUARD)
    d = np.floor(s).astype(np.int64)
    d[d >= 10] = 1
    return d


def benford_pmf_first(d1: int) -> float:
    if d1 not in DIGITS:
        raise ValueError(f"first digit must be in 1..9, got {d1}")
    return math.log1p(1.0 / d1) / math.log(10.0)


def benford_pmf_joint(digits: Sequence[int]) -> float:
    """P(D_1 = d_1, ..., D_m = d_m) = log10(1 + 1/(d_1 d_2 ... d_m as an integer))."""
    if not digits:
        raise ValueError("need at least one digit")
    if digits[0] == 0:
        raise LeadingZero("the first significant digit cannot be 0")
    if digits[0] not in DIGITS or any(d not in range(10) for d in digits[1:]):
        raise ValueError(f"invalid digit string {digits!r}")
    k = int("".join(str(d) for d in digits))
    return math.log1p(1.0 / k) / math.log(10.0)


BENFORD_FIRST = np.array([benford_pmf_first(d) for d in DIGITS])


@dataclass(frozen=True)
class DigitFrequencyTable:
    """Counts of first significant digits 1..9 (zero terms are not counted)."""

    counts: tuple[int, ...]
    total: int

    def __post_init__(self):
        if len(self.counts) != 9:
            raise ValueError("need exactly nine counts")
        if sum(self.counts) != self.total:
            raise ValueError("counts do not add up to total")

    @classmethod
    def from_digits(cls, digits: Iterable[int]) -> "DigitFrequencyTable":
        arr = np.asarray(list(digits) if not isinstance(digits, np.ndarray) else digits, dtype=np.int64)
        arr = arr[arr > 0]
        counts = np.bincount(arr, minlength=10)[1:10]
        return cls(tuple(int(c) for c in counts), int(counts.sum()))

    @property
    def frequencies(self) -> np.ndarray:
        if self.total == 0:
            raise EmptySample("no nonzero terms to tabulate")
        return np.array(self.counts, dtype=float) / self.total


@dataclass(frozen=True)
class BenfordGofResult:
    chi_squared: float
    dof: int
    significand_discrepancy: float | None

    def passes(self, alpha: float = 0.01) -> bool:
        return self.chi_squared <= CHI2_CRITICAL[alpha]


def chi_squared(table: DigitFrequencyTable) -> float:
    if table.total == 0:
        raise EmptySample("chi-squared needs at least one observation")
    expected = table.total * BENFORD_FIRST
    obs = np.array(table.counts, dtype=float)
    return float(np.sum((obs - expected) ** 2 / expected))


def discrepancy(log_values: Sequence[float] | np.ndarray) -> float:
    """sup_t |#{S(x_j) <= t}/n - log10 t| over t in [1, 10), from log10|x_j|."""
    L = np.asarray(log_values, dtype=float)
    L = L[np.isfinite(L)]
    if L.size == 0:
        raise EmptySample("discrepancy needs at least one nonzero value")
    u = np.sort(L - np.floor(L))
    n = u.size
    k = np.arange(1, n + 1)
    return float(max(np.max(k / n - u), np.max(u - (k - 1) / n)))


def gof(table: DigitFrequencyTable, log_values: Sequence[float] | np.ndarray | None = None) -> BenfordGofResult:
    disc = discrepancy(log_values) if log_values is not None else None
    return BenfordGofResult(chi_squared(table), CHI2_DOF, disc)


def expected_reciprocal_significand(distribution: str) -> float:
    """E[1/S] when S follows Benford's law or is uniform on [1, 10)."""
    if distribution == "benford":
        return 0.9 / math.log(10.0)
    if distribution == "uniform":
        return math.log(10.0) / 9.0
    raise ValueError(f"unknown distribution {distribution!r}; use 'benford' or 'uniform'")
