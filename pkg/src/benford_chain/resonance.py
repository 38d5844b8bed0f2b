"""Nonresonance test: equal-modulus eigenvalue classes and bounded integer relations.

A chain is resonant when some class of dominated eigenvalues with a common
modulus L0 contains two real members, or when 1, log10 L0 and the reduced
arguments arg/(2 pi) of its members (0 and 1/2 removed) satisfy an integer
relation.  Rational independence is undecidable from floating-point data,
so relations are searched exhaustively up to max|q_j| <= Qmax with residual
<= eps; every verdict records the bounds it was obtained under.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

import numpy as np

from .chains import StochasticMatrix, require_ergodic
from .contfrac import best_rational
from .errors import DimensionTooLarge
from .spectral import CLUSTER_TOL, EigenStructure, eigen_decompose, principal_arg

DEFAULT_QMAX = 100
DEFAULT_EPS = 1e-10
MODULUS_TOL = 1e-9
REAL_TOL = 1e-9
ZERO_EIGENVALUE_TOL = 1e-12
SNAP_TOL = 1e-12
MAX_RELATION_LENGTH = 6
NEAR_MISS_FACTOR = 100.0


class ResonanceStatus(str, Enum):
    NONRESONANT = "nonresonant"
    RESONANT = "resonant"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class ModulusClass:
    modulus: float  # L0
    members: tuple[complex, ...]  # eigenvalues with Im >= 0, arg descending
    reduced_args: tuple[float, ...]  # arg/(2 pi) in (0, 1/2)

    @property
    def log_modulus(self) -> float:
        return math.log10(self.modulus)

    @property
    def real_members(self) -> tuple[complex, ...]:
        return tuple(z for z in self.members if abs(z.imag) <= REAL_TOL)

    def to_dict(self) -> dict:
        return {
            "modulus": self.modulus,
            "log10_modulus": self.log_modulus,
            "members": [complex(z) for z in self.members],
            "reduced_args": list(self.reduced_args),
        }


@dataclass(frozen=True)
class Witness:
    """Evidence of resonance.

    kind is one of ``real_pair``, ``rational_log``, ``integer_relation``,
    ``zero_eigenvalue``.  ``values`` are the numbers a relation was found
    among (1, log10 L0, reduced args) and ``coefficients`` the relation.
    """

    kind: str
    class_index: int | None
    values: tuple[float, ...] = ()
    coefficients: tuple[int, ...] = ()
    residual: float = 0.0
    members: tuple[complex, ...] = ()
    rational: tuple[int, ...] = ()  # (p, q) with log10 L0 = p/q, for rational_log

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "class_index": self.class_index}
        if self.values:
            out["values"] = list(self.values)
        if self.coefficients:
            out["coefficients"] = list(self.coefficients)
            out["residual"] = self.residual
        if self.members:
            out["members"] = [complex(z) for z in self.members]
        if self.rational:
            out["log10_modulus_as_fraction"] = list(self.rational)
        return out


@dataclass(frozen=True)
class ResonanceVerdict:
    status: ResonanceStatus
    qmax: int
    eps: float
    classes: tuple[ModulusClass, ...]
    witnesses: tuple[Witness, ...] = ()
    near_misses: tuple[Witness, ...] = ()
    diagnostics: tuple[str, ...] = field(default_factory=tuple)

    @property
    def certificate(self) -> Witness | None:
        """The witness for a resonant verdict; None otherwise."""
        return self.witnesses[0] if self.witnesses else None

    def to_dict(self) -> dict:
        out = {
            "status": self.status.value,
            "bounds": {"qmax": self.qmax, "eps": self.eps},
            "modulus_classes": [c.to_dict() for c in self.classes],
            "witnesses": [w.to_dict() for w in self.witnesses],
            "diagnostics": list(self.diagnostics),
        }
        if self.status is ResonanceStatus.NONRESONANT:
            out["certificate"] = (f"no integer relation with max|q| <= {self.qmax} and residual <= {self.eps:g} "
                                  f"in any of {len(self.classes)} modulus classes")
        if self.near_misses:
            out["near_misses"] = [w.to_dict() for w in self.near_misses]
        return out


def detect_rational(x: float, qmax: int = DEFAULT_QMAX, eps: float = DEFAULT_EPS) -> tuple[int, int] | None:
    """(p, q) for the first convergent of x with q <= qmax and |x - p/q| <= eps, else None."""
    r = best_rational(float(x), qmax, eps)
    return None if r is None else (r.numerator, r.denominator)


def _canonical(q: tuple[int, ...]) -> tuple[int, ...]:
    nz = [c for c in q if c != 0]
    return q if nz[-1] > 0 else tuple(-c for c in q)


def _relation_key(q: tuple[int, ...]):
    return (max(abs(c) for c in q), sum(abs(c) for c in q), tuple(abs(c) for c in q), q)


def _grid(k: int, qmax: int) -> np.ndarray:
    if k == 0:
        return np.zeros((1, 0), dtype=np.int64)
    axes = np.arange(-qmax, qmax + 1, dtype=np.int16 if qmax < 2 ** 15 else np.int64)
    mesh = np.meshgrid(*([axes] * k), indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def _relations_within(xs: np.ndarray, qmax: int, tol: float) -> list[tuple[tuple[int, ...], float]]:
    """Every nonzero q in [-qmax, qmax]^k with |q . xs| <= tol (meet in the middle)."""
    k = len(xs)
    h = k // 2
    A = _grid(h, qmax)
    B = _grid(k - h, qmax)
    sA = A @ xs[:h] if h else np.zeros(1)
    sB = B @ xs[h:]
    order = np.argsort(sB, kind="stable")
    sB_sorted = sB[order]
    lo = np.searchsorted(sB_sorted, -sA - tol, side="left")
    hi = np.searchsorted(sB_sorted, -sA + tol, side="right")
    found = []
    for ia in np.flatnonzero(hi > lo):
        for pos in range(lo[ia], hi[ia]):
            ib = order[pos]
            q = tuple(int(v) for v in np.concatenate([A[ia], B[ib]]))
            if any(q):
                found.append((q, abs(float(sA[ia] + sB[ib]))))
    return found


def integer_relation(xs: Sequence[float], qmax: int = DEFAULT_QMAX, eps: float = DEFAULT_EPS) -> tuple[int, ...] | None:
    """Smallest nonzero integer vector q with max|q_j| <= qmax and |sum q_j x_j| <= eps.

    Minimal means smallest max|q_j|, then smallest sum|q_j|, then the
    lexicographically smallest (|q_1|, ..., |q_k|).  The sign is
    fixed by making the last nonzero entry positive.  The search is
    exhaustive over the box, so None means no such relation exists.
    """
    found = _search(xs, qmax, eps)
    return found[0] if found else None


def _search(xs: Sequence[float], qmax: int, tol: float) -> tuple[tuple[int, ...], float] | None:
    x = np.asarray([float(v) for v in xs], dtype=float)
    if len(x) > MAX_RELATION_LENGTH:
        raise DimensionTooLarge(f"integer relation search supports at most {MAX_RELATION_LENGTH} numbers")
    if len(x) < 1:
        raise ValueError("need at least one number")
    cands = _relations_within(x, qmax, tol)
    if not cands:
        return None
    best = min(((_canonical(q), r) for q, r in cands), key=lambda t: _relation_key(t[0]))
    return best


def _snap(t: float, qmax: int) -> float:
    """Replace t by p/q when within SNAP_TOL of a rational with q <= qmax."""
    r = best_rational(t, qmax, SNAP_TOL)
    return float(r) if r is not None else t


def modulus_classes(eig: EigenStructure, tol: float = MODULUS_TOL) -> tuple[ModulusClass, ...]:
    """Partition sigma(P)+ minus {1} into classes of equal modulus, largest modulus first."""
    spectrum = [z for z, _ in eig.distinct(CLUSTER_TOL)]
    one = min(range(len(spectrum)), key=lambda k: abs(spectrum[k] - 1.0))
    upper = [z for k, z in enumerate(spectrum) if k != one and z.imag >= -REAL_TOL]
    upper.sort(key=lambda z: -abs(z))
    classes: list[list[complex]] = []
    for z in upper:
        if classes and abs(abs(classes[-1][-1]) - abs(z)) <= tol:
            classes[-1].append(z)
        else:
            classes.append([z])
    out = []
    for members in classes:
        members.sort(key=lambda z: -principal_arg(z))
        L0 = float(np.mean([abs(z) for z in members]))
        args = []
        for z in members:
            if abs(z.imag) <= REAL_TOL:
                continue
            t = principal_arg(z) / (2 * math.pi)
            if t <= SNAP_TOL or abs(t - 0.5) <= SNAP_TOL:
                continue
            args.append(t)
        out.append(ModulusClass(L0, tuple(members), tuple(args)))
    return tuple(out)


def nonresonance_verdict(
    P: StochasticMatrix,
    qmax: int = DEFAULT_QMAX,
    eps: float = DEFAULT_EPS,
    eig: EigenStructure | None = None,
) -> ResonanceVerdict:
    if qmax < 1 or eps <= 0:
        raise ValueError("need qmax >= 1 and eps > 0")
    require_ergodic(P)
    if eig is None:
        eig = eigen_decompose(P)
    classes = modulus_classes(eig)
    diagnostics: list[str] = []
    witnesses: list[Witness] = []
    near: list[Witness] = []

    for a, b in zip(classes, classes[1:]):
        if a.modulus - b.modulus <= 10 * MODULUS_TOL:
            diagnostics.append(f"moduli {a.modulus:.12g} and {b.modulus:.12g} are within {10 * MODULUS_TOL:g}; "
                               "class assignment is numerically fragile")

    for ci, c in enumerate(classes):
        if c.modulus <= ZERO_EIGENVALUE_TOL:
            witnesses.append(Witness("zero_eigenvalue", ci, members=c.members))
            continue
        reals = c.real_members
        if len(reals) >= 2:
            witnesses.append(Witness("real_pair", ci, members=reals))
            continue
        logL = c.log_modulus
        r = detect_rational(logL, qmax, eps)
        if r is not None:
            p, q = r
            witnesses.append(Witness("rational_log", ci, values=(1.0, logL), coefficients=_canonical((p, -q)),
                                     residual=abs(q * logL - p), rational=(p, q)))
            continue
        if not c.reduced_args:
            near_r = detect_rational(logL, qmax, NEAR_MISS_FACTOR * eps)
            if near_r is not None:
                near.append(Witness("rational_log", ci, values=(1.0, logL), coefficients=_canonical((near_r[0], -near_r[1]))))
            continue
        values = (1.0, logL) + tuple(_snap(t, qmax) for t in c.reduced_args)
        if len(values) > MAX_RELATION_LENGTH:
            diagnostics.append(f"class {ci} has {len(values)} numbers; relation search limited to {MAX_RELATION_LENGTH}")
            near.append(Witness("search_truncated", ci, values=values))
            continue
        hit = _search(values, qmax, eps)
        if hit is not None:
            witnesses.append(Witness("integer_relation", ci, values=values, coefficients=hit[0], residual=hit[1]))
            continue
        miss = _search(values, qmax, NEAR_MISS_FACTOR * eps)
        if miss is not None:
            near.append(Witness("integer_relation", ci, values=values, coefficients=miss[0], residual=miss[1]))

    if witnesses:
        status = ResonanceStatus.RESONANT
    elif near:
        status = ResonanceStatus.UNDECIDED
        diagnostics.append(f"no relation within eps = {eps:g}, but near relations within {NEAR_MISS_FACTOR * eps:g} exist")
    else:
        status = ResonanceStatus.NONRESONANT
    return ResonanceVerdict(status, qmax, eps, classes, tuple(witnesses), tuple(near), tuple(diagnostics))


def all_subsets_resonant(eig: EigenStructure, qmax: int = DEFAULT_QMAX, eps: float = DEFAULT_EPS) -> bool:
    """Literal subset-by-subset evaluation of the resonance condition (reference for small d)."""
    for c in modulus_classes(eig):
        if c.modulus <= ZERO_EIGENVALUE_TOL:
            return True
        for r in range(1, len(c.members) + 1):
            for sub in itertools.combinations(c.members, r):
                if sum(1 for z in sub if abs(z.imag) <= REAL_TOL) >= 2:
                    return True
                args = [principal_arg(z) / (2 * math.pi) for z in sub if abs(z.imag) > REAL_TOL]
                args = [t for t in args if SNAP_TOL < t and abs(t - 0.5) > SNAP_TOL]
                vals = [1.0, c.log_modulus] + [_snap(t, qmax) for t in args]
                if _search(vals, qmax, eps) is not None:
                    return True
    return False
