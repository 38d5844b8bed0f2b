"""Log-significand series for components of P**n - P* and P**(n+1) - P**n.

Two evaluation paths:

* log-domain spectral sums (simple spectrum): x_n = L**n * xi_n with
  xi_n = sum_l c_l (lambda_l / L)**n, so magnitudes far below the float
  range are handled exactly in the log.
* extended-precision matrix powers (any spectrum), sized so that the
  smallest term keeps 64 significant bits.

Values are kept as (characteristic, mantissa-log) pairs: log10|x_n| = k + f
with f in [0, 1), which is what digit statistics need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable

import numpy as np

from .chains import StochasticMatrix, limiting_matrix_mp, mp_context, require_ergodic
from .errors import NOverflow, NotAperiodic, NotIrreducible, PrecisionBudgetExceeded
from .resonance import ResonanceStatus, ResonanceVerdict, detect_rational
from .significand import DigitFrequencyTable, first_digits_from_fraction
from .spectral import KINDS, MODULUS_TIE_TOL, SpectralDecomposition, eigen_decompose

ZERO_THRESHOLD = 1e-12
EIGENVALUE_ZERO = 1e-12
UNDERFLOW_LOG10 = -320.0
UNIT_CIRCLE_TOL = 1e-9
MAX_TERMS = 10 ** 6
MAX_FALLBACK_TERMS = 2 * 10 ** 4
PRECISION_BUDGET_BITS = 1 << 19
PERIODIC_RESIDUE_LIMIT = 1000


class ComponentVerdict(str, Enum):
    BENFORD_PREDICTED = "BenfordPredicted"
    EVENTUALLY_ZERO = "EventuallyZero"
    NON_BENFORD_RATIONAL_LOG = "NonBenfordRationalLog"
    NON_BENFORD_RESONANT = "NonBenfordResonant"
    UNDETERMINED = "Undetermined"


VERDICT_NOTES = {
    ComponentVerdict.BENFORD_PREDICTED: "dominant behaviour is a Benford geometric-type term",
    ComponentVerdict.EVENTUALLY_ZERO: "all spectral coefficients vanish",
    ComponentVerdict.NON_BENFORD_RATIONAL_LOG: "dominant modulus has a rational base-10 logarithm",
    ComponentVerdict.NON_BENFORD_RESONANT: "dominant eigenvalues are rotations by roots of unity and cancel on a residue class",
    ComponentVerdict.UNDETERMINED: "resonant spectrum; theory does not decide this component",
}


@dataclass(frozen=True, eq=False)
class LogSignificandSeries:
    component: tuple[int, int]  # 0-based (i, j)
    kind: str
    n: np.ndarray
    characteristic: np.ndarray  # floor(log10|x_n|); 0 where zero
    fraction: np.ndarray  # frac(log10|x_n|) in [0, 1); NaN where zero
    is_zero: np.ndarray

    @property
    def label(self) -> str:
        return f"({self.component[0] + 1},{self.component[1] + 1})"

    def __len__(self) -> int:
        return len(self.n)

    @property
    def log10_abs(self) -> np.ndarray:
        """log10|x_n| (NaN for zero terms); rounds the fractional part for large n."""
        return np.where(self.is_zero, np.nan, self.characteristic + self.fraction)

    def significands(self) -> np.ndarray:
        return np.where(self.is_zero, np.nan, 10.0 ** np.nan_to_num(self.fraction))

    def first_digits(self) -> np.ndarray:
        out = np.zeros(len(self.n), dtype=np.int64)
        nz = ~self.is_zero
        out[nz] = first_digits_from_fraction(self.fraction[nz])
        return out

    def digit_table(self) -> DigitFrequencyTable:
        return DigitFrequencyTable.from_digits(self.first_digits())

    @property
    def zero_count(self) -> int:
        return int(self.is_zero.sum())


def _split(a: float) -> tuple[float, float]:
    """Veltkamp split: a = hi + lo, each half fits in 26 bits."""
    c = 134217729.0 * a
    hi = c - (c - a)
    return hi, a - hi


def scaled_log(n: np.ndarray, log_l: float) -> tuple[np.ndarray, np.ndarray]:
    """(floor, frac) of n * log_l with the products formed exactly (n < 2**26)."""
    hi, lo = _split(log_l)
    n = np.asarray(n, dtype=np.float64)
    p1 = n * hi
    p2 = n * lo
    k1 = np.floor(p1)
    k2 = np.floor(p2)
    f = (p1 - k1) + (p2 - k2)
    c = np.floor(f)
    return (k1 + k2 + c).astype(np.int64), f - c


def _add_log(k: np.ndarray, f: np.ndarray, g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    s = f + g
    c = np.floor(s)
    frac = s - c
    frac = np.where(frac >= 1.0, 0.0, frac)
    return k + c.astype(np.int64), frac


def _check_range(N: int, start: int, limit: int) -> None:
    if N < 1:
        raise ValueError("N must be positive")
    if start < 1:
        raise ValueError("sequences are indexed from n = 1")
    if N + start - 1 > limit:
        raise NOverflow(f"n up to {N + start - 1} exceeds the supported {limit}")


def _require_decay(dec: SpectralDecomposition) -> None:
    # P**n - P* -> 0 needs exactly one eigenvalue on the unit circle, namely 1
    lam = dec.eigenvalues
    circle = lam[np.abs(lam) >= 1.0 - UNIT_CIRCLE_TOL]
    ones = int(np.sum(np.abs(circle - 1.0) < UNIT_CIRCLE_TOL))
    if ones > 1:
        raise NotIrreducible("eigenvalue 1 is repeated: more than one closed class")
    if len(circle) > ones:
        others = [complex(z) for z in circle if abs(z - 1.0) >= UNIT_CIRCLE_TOL]
        raise NotAperiodic(f"eigenvalues {others} on the unit circle: the chain is periodic")


def _active(dec: SpectralDecomposition, i: int, j: int, kind: str):
    _require_decay(dec)
    c = dec.coefficients(i, j, kind)
    lam = dec.eigenvalues[1:]
    mask = (np.abs(c) > ZERO_THRESHOLD) & (np.abs(lam) > EIGENVALUE_ZERO)
    return c[mask], lam[mask]


def component_log_series(dec: SpectralDecomposition, i: int, j: int, kind: str = "pn_minus_pstar",
                         N: int = 1000, start: int = 1) -> LogSignificandSeries:
    """Series for component (i, j) (0-based), n = start .. start + N - 1."""
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    d = dec.eigen.d
    if not (0 <= i < d and 0 <= j < d):
        raise IndexError(f"component ({i},{j}) out of range for d = {d}")
    _check_range(N, start, MAX_TERMS)
    n = np.arange(start, start + N, dtype=np.int64)
    c, lam = _active(dec, i, j, kind)
    if len(c) == 0:
        return LogSignificandSeries((i, j), kind, n, np.zeros(N, np.int64), np.full(N, np.nan), np.ones(N, bool))

    mod = np.abs(lam)
    L = float(mod.max())
    dominant = mod >= L * (1.0 - MODULUS_TIE_TOL)
    log_ratio = np.where(dominant, 0.0, np.log10(mod) - math.log10(L))
    theta = np.angle(lam)
    theta = np.where(lam.imag == 0.0, np.where(lam.real < 0, np.pi, 0.0), theta)

    xi = np.zeros(N, dtype=float)
    nf = n.astype(float)
    for cl, lr, th in zip(c, log_ratio, theta):
        e = nf * lr
        keep = e >= UNDERFLOW_LOG10
        mag = np.where(keep, 10.0 ** np.where(keep, e, 0.0), 0.0)
        # x_n is real: conjugate pairs cancel the imaginary parts exactly
        xi += mag * (cl.real * np.cos(nf * th) - cl.imag * np.sin(nf * th))
    a = np.abs(xi)
    is_zero = a <= ZERO_THRESHOLD
    k, f = scaled_log(n, math.log10(L))
    g = np.log10(np.where(is_zero, 1.0, a))
    k, f = _add_log(k, f, g)
    f = np.where(is_zero, np.nan, f)
    k = np.where(is_zero, 0, k)
    return LogSignificandSeries((i, j), kind, n, k, f, is_zero)


def fallback_bits(P: StochasticMatrix, n_max: int) -> int:
    """Working precision keeping ~64 significant bits in the smallest nonzero term up to n_max."""
    lam = eigen_decompose(P).eigenvalues[1:]
    nz = np.abs(lam)[np.abs(lam) > EIGENVALUE_ZERO]
    m = float(nz.min()) if len(nz) else 1.0
    return int(math.ceil(n_max * math.log2(1.0 / m) + math.log2(n_max * P.d) + 96))


def fallback_log_series(P: StochasticMatrix, i: int, j: int, kind: str = "pn_minus_pstar",
                        N: int = 1000, start: int = 1) -> LogSignificandSeries:
    """Same series via exact-input matrix powers in extended precision (no spectral assumptions)."""
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    require_ergodic(P)
    _check_range(N, start, MAX_FALLBACK_TERMS)
    n_max = start + N - 1 + (1 if kind == "successive_diff" else 0)
    bits = fallback_bits(P, n_max)
    if bits > PRECISION_BUDGET_BITS:
        raise PrecisionBudgetExceeded(f"{bits} bits needed, budget is {PRECISION_BUDGET_BITS}")
    ctx = mp_context(bits)
    M = P.to_mp(ctx)
    Pstar = limiting_matrix_mp(P, ctx)
    d = P.d
    # row i of D_n = P**n - P*; D_{n+1} = D_n P
    row = [M[i, k] - Pstar[i, k] for k in range(d)]
    noise = ctx.mpf(2) ** (-(bits - int(math.log2(n_max * d)) - 32))
    low = mp_context(128)
    k_out = np.zeros(N, np.int64)
    f_out = np.full(N, np.nan)
    z_out = np.ones(N, bool)
    prev = None
    for step in range(1, n_max + 1):
        if kind == "pn_minus_pstar":
            x = row[j] if step >= start else None
        else:
            x = (row[j] - prev) if prev is not None and step - 1 >= start else None
        if x is not None:
            idx = (step if kind == "pn_minus_pstar" else step - 1) - start
            if abs(x) > noise:
                lg = low.log10(low.mpf(abs(x)))
                fl = int(low.floor(lg))
                k_out[idx] = fl
                f_out[idx] = float(lg - fl)
                z_out[idx] = False
        prev = row[j]
        if step < n_max:
            row = [ctx.fsum(row[m] * M[m, k] for m in range(d)) for k in range(d)]
    f_out = np.where(f_out >= 1.0, 0.0, f_out)
    return LogSignificandSeries((i, j), kind, np.arange(start, start + N, dtype=np.int64), k_out, f_out, z_out)


def _periodic_residues(c: np.ndarray, lam: np.ndarray, qmax: int, eps: float) -> np.ndarray | None:
    """Values of sum c_l e^{i r theta_l}, r = 0..q-1, when every arg is a rational turn; else None."""
    period = 1
    for z in lam:
        turn = (float(np.angle(z)) / (2 * math.pi)) % 1.0
        r = detect_rational(turn, qmax, eps)
        if r is None:
            return None
        period = period * r[1] // math.gcd(period, r[1])
        if period > PERIODIC_RESIDUE_LIMIT:
            return None
    r = np.arange(period)
    phases = np.exp(1j * np.outer(r, np.angle(lam)))
    return np.real(phases @ c)


def component_verdict(dec: SpectralDecomposition, resonance: ResonanceVerdict, i: int, j: int,
                      kind: str = "pn_minus_pstar") -> ComponentVerdict:
    c, lam = _active(dec, i, j, kind)
    if len(c) == 0:
        return ComponentVerdict.EVENTUALLY_ZERO
    if resonance.status is ResonanceStatus.NONRESONANT:
        return ComponentVerdict.BENFORD_PREDICTED
    mod = np.abs(lam)
    L = float(mod.max())
    dom = mod >= L * (1.0 - MODULUS_TIE_TOL)
    if detect_rational(math.log10(L), resonance.qmax, resonance.eps) is not None:
        return ComponentVerdict.NON_BENFORD_RATIONAL_LOG
    if dom.sum() == 1 and abs(lam[dom][0].imag) == 0.0:
        return ComponentVerdict.BENFORD_PREDICTED
    residues = _periodic_residues(c[dom], lam[dom], resonance.qmax, resonance.eps)
    if residues is not None and dom.all():
        vanish = np.abs(residues) <= ZERO_THRESHOLD
        if vanish.any() and not vanish.all():
            return ComponentVerdict.NON_BENFORD_RESONANT
    return ComponentVerdict.UNDETERMINED


def fallback_component_verdict(P: StochasticMatrix, resonance: ResonanceVerdict, i: int, j: int,
                               kind: str = "pn_minus_pstar", window: int = 200) -> ComponentVerdict:
    """Verdict without a spectral decomposition (repeated eigenvalues).

    A component whose last half-window is identically zero is eventually
    zero; otherwise the chain-level verdict decides.
    """
    s = fallback_log_series(P, i, j, kind, N=window)
    if s.is_zero[window // 2:].all():
        return ComponentVerdict.EVENTUALLY_ZERO
    if resonance.status is ResonanceStatus.NONRESONANT:
        return ComponentVerdict.BENFORD_PREDICTED
    return ComponentVerdict.UNDETERMINED


# -- classical sequences -------------------------------------------------------

CLASSIC_KINDS = ("pow2", "factorial", "fibonacci")
_EXACT_FIB_LIMIT = 90


def classic_sequence_logs(kind: str, N: int) -> tuple[np.ndarray, np.ndarray]:
    """(characteristic, fraction) of log10 x_n for n = 1..N."""
    if N < 1:
        raise ValueError("N must be positive")
    if N > MAX_TERMS:
        raise NOverflow(f"N = {N} exceeds {MAX_TERMS}")
    n = np.arange(1, N + 1, dtype=np.int64)
    if kind == "pow2":
        return scaled_log(n, math.log10(2.0))
    if kind == "factorial":
        # compensated running sum of log10 k
        k_out = np.empty(N, np.int64)
        f_out = np.empty(N)
        total, comp = 0.0, 0.0
        for idx, k in enumerate(range(1, N + 1)):
            y = math.log10(k) - comp
            t = total + y
            comp = (t - total) - y
            total = t
            fl = math.floor(total)
            k_out[idx] = fl
            f_out[idx] = total - fl
        return k_out, f_out
    if kind == "fibonacci":
        phi = (1 + math.sqrt(5.0)) / 2
        k, f = scaled_log(n, math.log10(phi))
        k, f = _add_log(k, f, np.full(N, -0.5 * math.log10(5.0)))
        # exact values where the (psi/phi)**n correction still matters
        a, b = 1, 1
        for idx in range(min(N, _EXACT_FIB_LIMIT)):
            lg = math.log10(a)
            fl = math.floor(lg)
            k[idx], f[idx] = fl, lg - fl
            a, b = b, a + b
        return k, f
    raise ValueError(f"unknown sequence {kind!r}; choose from {CLASSIC_KINDS}")


def classic_digit_table(kind: str, N: int) -> DigitFrequencyTable:
    _, f = classic_sequence_logs(kind, N)
    return DigitFrequencyTable.from_digits(first_digits_from_fraction(f))


def all_component_series(dec: SpectralDecomposition, kind: str, N: int, start: int = 1) -> Iterable[LogSignificandSeries]:
    """Components in column-major order (1,1), (2,1), ..., (d,d)."""
    d = dec.eigen.d
    for j in range(d):
        for i in range(d):
            yield component_log_series(dec, i, j, kind, N, start)
