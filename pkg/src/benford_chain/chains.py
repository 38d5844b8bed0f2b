"""Validated row-stochastic matrices, chain classification and limiting behaviour."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

import mpmath
import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import (
    DimensionTooLarge,
    DimensionTooSmall,
    MatrixValidationError,
    NegativeEntry,
    NotAperiodic,
    NotIrreducible,
    NOverflow,
    RowSumViolation,
)

ROW_SUM_TOL = 1e-9
MAX_DIM = 16
MAX_ORACLE_POWER = 500


def mp_context(precision_bits: int) -> mpmath.MPContext:
    """Private mpmath context, so concurrent callers never share a global precision."""
    ctx = mpmath.MPContext()
    ctx.prec = precision_bits
    return ctx


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (bool, np.bool_)):
        raise MatrixValidationError(f"boolean entry {x!r}")
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise MatrixValidationError(f"unparseable entry {x!r}") from exc
    if isinstance(x, (float, np.floating)):
        if not np.isfinite(x):
            raise MatrixValidationError(f"non-finite entry {x!r}")
        # shortest round-trip repr recovers the decimal literal the caller typed
        return Fraction(repr(float(x)))
    raise MatrixValidationError(f"unsupported entry type {type(x).__name__}")


@dataclass(frozen=True, eq=False)
class StochasticMatrix:
    """Row-stochastic d x d matrix.

    ``exact`` keeps the rational value of every entry (decimal inputs are
    exact); ``values`` is its float64 image, read-only.
    """

    exact: tuple[tuple[Fraction, ...], ...]
    values: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        arr = np.array([[float(v) for v in row] for row in self.exact], dtype=float)
        arr.flags.writeable = False
        object.__setattr__(self, "values", arr)

    @property
    def d(self) -> int:
        return len(self.exact)

    def __eq__(self, other):
        return isinstance(other, StochasticMatrix) and self.exact == other.exact

    def __hash__(self):
        return hash(self.exact)

    def to_mp(self, ctx: mpmath.MPContext):
        return ctx.matrix([[ctx.mpf(v.numerator) / v.denominator for v in row] for row in self.exact])

    def permuted(self, perm: Sequence[int]) -> "StochasticMatrix":
        """Relabel states: new state k is old state perm[k]."""
        return StochasticMatrix(tuple(tuple(self.exact[perm[i]][perm[j]] for j in range(self.d))
                                      for i in range(self.d)))

    def to_rows(self) -> list[list[str]]:
        return [[str(v) for v in row] for row in self.exact]


@dataclass(frozen=True)
class ChainClassification:
    irreducible: bool
    period: int
    strongly_connected_components: tuple[tuple[int, ...], ...]
    # per-SCC period; 0 marks an SCC without any cycle (single state, no self-loop)
    component_periods: tuple[int, ...]
    # indices into strongly_connected_components of the classes no edge leaves
    closed_components: tuple[int, ...] = ()

    @property
    def aperiodic(self) -> bool:
        return self.irreducible and self.period == 1

    @property
    def transient_states(self) -> tuple[int, ...]:
        closed = {s for k in self.closed_components for s in self.strongly_connected_components[k]}
        return tuple(s for c in self.strongly_connected_components for s in c if s not in closed)

    @property
    def has_unique_limit(self) -> bool:
        """One closed class, aperiodic: P**n converges to a rank-one P* (transient states allowed)."""
        return len(self.closed_components) == 1 and self.component_periods[self.closed_components[0]] == 1

    def to_dict(self) -> dict:
        return {
            "irreducible": self.irreducible,
            "period": self.period,
            "aperiodic": self.aperiodic,
            "strongly_connected_components": [[s + 1 for s in c] for c in self.strongly_connected_components],
            "component_periods": list(self.component_periods),
            "closed_components": [[s + 1 for s in self.strongly_connected_components[k]] for k in self.closed_components],
            "transient_states": [s + 1 for s in self.transient_states],
        }


@dataclass(frozen=True, eq=False)
class StationaryDistribution:
    pi: np.ndarray

    def residual(self, P: StochasticMatrix) -> float:
        return float(np.max(np.abs(self.pi @ P.values - self.pi)))


def validate_stochastic(raw) -> StochasticMatrix:
    """Check and normalise a square matrix of probabilities.

    Entries may be numbers, decimal strings or Fractions.  Rows within
    ``ROW_SUM_TOL`` of 1 are rescaled to sum to exactly 1.
    """
    rows = [list(r) for r in (raw.tolist() if isinstance(raw, np.ndarray) else raw)]
    d = len(rows)
    if any(len(r) != d for r in rows):
        raise MatrixValidationError(f"matrix is not square: {d} rows of lengths {[len(r) for r in rows]}")
    if d < 2:
        raise DimensionTooSmall(f"need d >= 2, got {d}")
    if d > MAX_DIM:
        raise DimensionTooLarge(f"d = {d} exceeds the supported maximum {MAX_DIM}")
    exact = [[_to_fraction(x) for x in r] for r in rows]
    out = []
    for i, r in enumerate(exact):
        for j, v in enumerate(r):
            if v < 0:
                raise NegativeEntry(f"entry ({i + 1},{j + 1}) = {float(v)} is negative")
        s = sum(r)
        if abs(float(s) - 1.0) > ROW_SUM_TOL:
            raise RowSumViolation(f"row {i + 1} sums to {float(s)!r}")
        out.append(tuple(v / s for v in r))
    return StochasticMatrix(tuple(out))


def _period_of(component: Sequence[int], adj: np.ndarray) -> int:
    members = set(component)
    root = component[0]
    level = {root: 0}
    frontier = [root]
    while frontier:
        nxt = []
        for u in frontier:
            for v in np.flatnonzero(adj[u]):
                v = int(v)
                if v in members and v not in level:
                    level[v] = level[u] + 1
                    nxt.append(v)
        frontier = nxt
    g = 0
    for u in component:
        for v in np.flatnonzero(adj[u]):
            v = int(v)
            if v in members:
                g = gcd(g, level[u] + 1 - level[v])
    return g


def classify(P: StochasticMatrix) -> ChainClassification:
    adj = np.array([[v > 0 for v in row] for row in P.exact])
    n_comp, labels = connected_components(adj.astype(int), directed=True, connection="strong")
    comps = sorted((tuple(int(s) for s in np.flatnonzero(labels == k)) for k in range(n_comp)), key=min)
    periods = tuple(_period_of(c, adj) for c in comps)
    closed = tuple(k for k, c in enumerate(comps)
                   if not any(adj[u, v] for u in c for v in range(P.d) if v not in c))
    irreducible = len(comps) == 1
    if irreducible:
        period = periods[0]
    else:
        period = 0
        for p in periods:
            period = gcd(period, p)
        period = period or 1
    return ChainClassification(irreducible, period, tuple(comps), periods, closed)


def require_ergodic(P: StochasticMatrix) -> ChainClassification:
    """Return the classification, raising unless P**n converges to a rank-one limit.

    Accepted: irreducible aperiodic chains, and chains whose only closed
    class is aperiodic (remaining states transient).
    """
    cls = classify(P)
    if len(cls.closed_components) != 1:
        raise NotIrreducible(
            f"chain is reducible with {len(cls.closed_components)} closed classes "
            f"among {len(cls.strongly_connected_components)} strongly connected components",
            cls,
        )
    period = cls.component_periods[cls.closed_components[0]]
    if period != 1:
        raise NotAperiodic(f"chain is periodic with period {period}; such a chain cannot be Benford", cls)
    return cls


def stationary_distribution(P: StochasticMatrix) -> StationaryDistribution:
    require_ergodic(P)
    d = P.d
    A = np.vstack([P.values.T - np.eye(d), np.ones((1, d))])
    b = np.zeros(d + 1)
    b[-1] = 1.0
    pi = np.linalg.lstsq(A, b, rcond=None)[0]
    # one step of iterative refinement
    pi += np.linalg.lstsq(A, b - A @ pi, rcond=None)[0]
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    pi.flags.writeable = False
    return StationaryDistribution(pi)


def limiting_matrix(P: StochasticMatrix) -> np.ndarray:
    pi = stationary_distribution(P).pi
    return np.tile(pi, (P.d, 1))


def stationary_distribution_mp(P: StochasticMatrix, ctx: mpmath.MPContext):
    """Stationary vector at the precision of ``ctx`` (square system, last equation replaced by sum = 1)."""
    require_ergodic(P)
    d = P.d
    M = P.to_mp(ctx)
    A = ctx.matrix(d, d)
    for i in range(d - 1):
        for j in range(d):
            A[i, j] = M[j, i] - (1 if i == j else 0)
    for j in range(d):
        A[d - 1, j] = 1
    rhs = ctx.matrix([0] * (d - 1) + [1])
    return ctx.lu_solve(A, rhs)


def limiting_matrix_mp(P: StochasticMatrix, ctx: mpmath.MPContext):
    pi = stationary_distribution_mp(P, ctx)
    return ctx.matrix([[pi[j] for j in range(P.d)] for _ in range(P.d)])


def matrix_power_oracle(P: StochasticMatrix, n: int, precision_bits: int = 256):
    """P**n by repeated squaring in software extended precision (test oracle)."""
    if n > MAX_ORACLE_POWER:
        raise NOverflow(f"n = {n} exceeds {MAX_ORACLE_POWER}")
    if n < 0:
        raise ValueError("n must be non-negative")
    if precision_bits < 128:
        raise ValueError("precision_bits must be at least 128")
    ctx = mp_context(precision_bits)
    base = P.to_mp(ctx)
    result = ctx.eye(P.d)
    while n:
        if n & 1:
            result = result * base
        base = base * base
        n >>= 1
    return result
