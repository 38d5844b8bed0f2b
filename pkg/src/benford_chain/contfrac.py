"""Simple continued fractions with certified partial quotients.

The Gauss map x -> 1/(x - floor x) is iterated on an enclosing interval.
Expansion stops as soon as the interval straddles an integer, so every
reported quotient is correct for every real number consistent with the
input and its stated uncertainty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Union

import mpmath

from .chains import mp_context

MAX_TERMS = 60
DEFAULT_WORKING_BITS = 600
FLOAT_REL_UNCERTAINTY = 1e-15

Real = Union[float, int, Fraction, mpmath.mpf]


@dataclass(frozen=True)
class ContinuedFraction:
    a0: int
    partial_quotients: tuple[int, ...]
    source_value: str
    requested_terms: int
    # number of certified partial quotients; below requested_terms means precision ran out
    precision_note: int
    exact: bool = False  # the expansion of a rational terminated

    @property
    def terms(self) -> tuple[int, ...]:
        return (self.a0,) + self.partial_quotients

    @property
    def exhausted(self) -> bool:
        return not self.exact and self.precision_note < self.requested_terms

    def __str__(self) -> str:
        return f"[{self.a0}; " + ", ".join(str(a) for a in self.partial_quotients) + "]"


@dataclass(frozen=True)
class Convergent:
    p: int
    q: int
    n: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)


@dataclass(frozen=True)
class IrrationalityProfile:
    max_quotient: int
    argmax_index: int  # 1-based index n of a_n
    geometric_mean: float
    terms: int


def _expand_exact(x: Fraction, max_terms: int) -> tuple[int, list[int], bool]:
    a0 = math.floor(x)
    r = x - a0
    out: list[int] = []
    while r != 0 and len(out) < max_terms:
        y = 1 / r
        a = math.floor(y)
        out.append(a)
        r = y - a
    return a0, out, r == 0


def _expand_interval(lo, hi, ctx, max_terms: int) -> tuple[int | None, list[int]]:
    """Quotients shared by every point of [lo, hi]; None for a0 if even it is uncertain."""
    pad = ctx.mpf(2) ** (-(ctx.prec - 4))
    a0 = int(ctx.floor(lo))
    if int(ctx.floor(hi)) != a0:
        return None, []
    out: list[int] = []
    flo, fhi = lo - a0, hi - a0
    while len(out) < max_terms:
        if flo <= 0:
            break  # interval touches an integer: next quotient unbounded
        # 1/x is decreasing; widen outward to cover rounding
        nlo = (1 / fhi) * (1 - pad)
        nhi = (1 / flo) * (1 + pad)
        a = int(ctx.floor(nlo))
        if int(ctx.floor(nhi)) != a:
            break
        out.append(a)
        flo, fhi = nlo - a, nhi - a
    return a0, out


def expand(
    x: Real,
    max_terms: int = 50,
    uncertainty: float | None = None,
    working_bits: int = DEFAULT_WORKING_BITS,
) -> ContinuedFraction:
    """Expand ``x`` into at most ``max_terms`` certified partial quotients a_1..a_m.

    Fractions and ints are treated as exact.  Floats carry a default relative
    uncertainty of 1e-15; mpmath numbers are trusted to roughly their
    precision unless ``uncertainty`` (absolute) says otherwise.
    """
    if max_terms > MAX_TERMS:
        raise ValueError(f"max_terms must be at most {MAX_TERMS}")
    if max_terms < 0:
        raise ValueError("max_terms must be non-negative")
    if isinstance(x, (Fraction, int)) and not isinstance(x, bool):
        a0, pq, done = _expand_exact(Fraction(x), max_terms)
        return ContinuedFraction(a0, tuple(pq), str(x), max_terms, len(pq), exact=done)

    ctx = mp_context(working_bits)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError("cannot expand a non-finite value")
        mid = ctx.mpf(x)
        delta = ctx.mpf(uncertainty if uncertainty is not None else FLOAT_REL_UNCERTAINTY * max(1.0, abs(x)))
        label = repr(x)
    else:
        mid = ctx.mpf(x)
        src_prec = getattr(getattr(x, "context", None), "prec", working_bits)
        delta = ctx.mpf(uncertainty) if uncertainty is not None else abs(mid) * ctx.mpf(2) ** (-(src_prec - 8)) + ctx.mpf(2) ** (-(src_prec - 8))
        label = mpmath.nstr(x, 30)
    a0, pq = _expand_interval(mid - delta, mid + delta, ctx, max_terms)
    if a0 is None:
        raise ValueError(f"uncertainty too large to determine even floor({label})")
    return ContinuedFraction(a0, tuple(pq), label, max_terms, len(pq))


def convergents(cf: ContinuedFraction) -> list[Convergent]:
    out = []
    p_prev, q_prev = 1, 0
    p, q = cf.a0, 1
    out.append(Convergent(p, q, 0))
    for n, a in enumerate(cf.partial_quotients, start=1):
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        out.append(Convergent(p, q, n))
    return out


def approximation_gap(x: Real, c: Convergent, next_quotient: int, precision_bits: int = DEFAULT_WORKING_BITS) -> tuple[float, float, bool]:
    """(|x - p_n/q_n|, 1/(a_{n+1} q_n^2), gap < bound) for n >= 2."""
    if c.n < 2:
        raise ValueError("the approximation bound is stated for n >= 2")
    ctx = mp_context(precision_bits)
    xv = ctx.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else ctx.mpf(x)
    gap = abs(xv - ctx.mpf(c.p) / c.q)
    bound = ctx.mpf(1) / (next_quotient * ctx.mpf(c.q) ** 2)
    return float(gap), float(bound), bool(gap < bound)


def irrationality_profile(cf: ContinuedFraction, terms: int | None = None) -> IrrationalityProfile:
    pq = cf.partial_quotients[: terms if terms is not None else len(cf.partial_quotients)]
    if not pq:
        raise ValueError("no partial quotients to profile")
    m = max(pq)
    return IrrationalityProfile(
        max_quotient=m,
        argmax_index=pq.index(m) + 1,
        geometric_mean=math.exp(sum(math.log(a) for a in pq) / len(pq)),
        terms=len(pq),
    )


def best_rational(x: float, qmax: int, eps: float) -> Fraction | None:
    """First convergent p/q of the exact binary value of ``x`` with q <= qmax and |x - p/q| <= eps."""
    cf = expand(Fraction(x), max_terms=MAX_TERMS)
    for c in convergents(cf):
        if c.q > qmax:
            return None
        if abs(Fraction(x) - c.value) <= eps:
            return c.value
    return None


# Closed forms evaluated at the caller's precision.
CLOSED_FORMS: dict[str, Callable[[mpmath.MPContext], mpmath.mpf]] = {
    "log10(0.3)": lambda ctx: ctx.log10(ctx.mpf(3) / 10),
    "golden_ratio": lambda ctx: (1 + ctx.sqrt(5)) / 2,
    # 3x3 chain with eigenvalues 1 and (-1 +- sqrt 21)/20
    "fast_mixing.log_abs_lambda2": lambda ctx: ctx.log10((1 + ctx.sqrt(21)) / 20),
    # 3x3 chain with eigenvalues 1 and (7 +- i sqrt 3)/20
    "slow_mixing.log_abs_lambda2": lambda ctx: ctx.log10(ctx.sqrt(52) / 20),
    "slow_mixing.arg_lambda2_over_2pi": lambda ctx: ctx.atan2(ctx.sqrt(3), 7) / (2 * ctx.pi),
}


def expand_closed_form(name: str, max_terms: int = 50, working_bits: int = DEFAULT_WORKING_BITS) -> ContinuedFraction:
    try:
        f = CLOSED_FORMS[name]
    except KeyError:
        raise ValueError(f"unknown constant {name!r}; known: {', '.join(sorted(CLOSED_FORMS))}") from None
    ctx = mp_context(working_bits)
    value = f(ctx)
    cf = expand(value, max_terms=max_terms, uncertainty=float(2.0 ** (-(working_bits - 16))) * max(1.0, float(abs(value))),
                working_bits=working_bits + 64)
    return ContinuedFraction(cf.a0, cf.partial_quotients, name, cf.requested_terms, cf.precision_note)
