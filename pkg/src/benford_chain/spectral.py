"""Eigenvalues, spectral projectors and multiple-root detection for small dense matrices.

Eigenpairs come from LAPACK (balanced Hessenberg QR via :func:`numpy.linalg.eig`);
what this module adds is the deterministic labelling, exact conjugate symmetry,
backward-error checks and the projectors B_l = v_l u_l^T / (u_l^T v_l).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .chains import StochasticMatrix, mp_context
from .errors import ConvergenceFailure, MultipleEigenvalue, UnsupportedDegree

GAP_TOL = 1e-8
MODULUS_TIE_TOL = 1e-9
REAL_AXIS_TOL = 1e-12
BACKWARD_ERROR_TOL = 1e-10
# eigenvalues closer than this are one point of the spectrum (defective
# eigenvalues split like eps**(1/k) under rounding)
CLUSTER_TOL = 1e-6

KINDS = ("pn_minus_pstar", "successive_diff")


def principal_arg(z: complex) -> float:
    """Argument in (-pi, pi]; negative reals map to +pi."""
    if z.imag == 0.0:
        return np.pi if z.real < 0 else 0.0
    return float(np.angle(z))


def spectral_order(values: Sequence[complex]) -> list[int]:
    """Indices sorting by modulus (descending), ties by argument (descending)."""
    idx = sorted(range(len(values)), key=lambda k: -abs(values[k]))
    out: list[int] = []
    group = [idx[0]] if idx else []
    for k in idx[1:]:
        if abs(abs(values[group[-1]]) - abs(values[k])) <= MODULUS_TIE_TOL:
            group.append(k)
        else:
            out.extend(sorted(group, key=lambda m: -principal_arg(values[m])))
            group = [k]
    out.extend(sorted(group, key=lambda m: -principal_arg(values[m])))
    return out


@dataclass(frozen=True, eq=False)
class EigenStructure:
    eigenvalues: np.ndarray  # complex, labelled |l_1| >= |l_2| >= ...
    simple: tuple[bool, ...]
    residuals: np.ndarray
    vectors: np.ndarray  # right eigenvectors as columns, same order

    @property
    def d(self) -> int:
        return len(self.eigenvalues)

    @property
    def all_simple(self) -> bool:
        return all(self.simple)

    def distinct(self, tol: float = CLUSTER_TOL) -> list[tuple[complex, int]]:
        """The spectrum as a set: (representative, multiplicity) pairs.

        Eigenvalues within ``tol`` of each other are merged and represented
        by their mean, which is far more accurate than any single member
        for a perturbed multiple eigenvalue.
        """
        vals = list(self.eigenvalues)
        parent = list(range(len(vals)))

        def find(k):
            while parent[k] != k:
                parent[k] = parent[parent[k]]
                k = parent[k]
            return k

        for a in range(len(vals)):
            for b in range(a + 1, len(vals)):
                if abs(vals[a] - vals[b]) <= tol:
                    parent[find(a)] = find(b)
        clusters: dict[int, list[complex]] = {}
        for k in range(len(vals)):
            clusters.setdefault(find(k), []).append(vals[k])
        reps = []
        for members in clusters.values():
            z = complex(np.mean(members))
            if abs(z.imag) <= CLUSTER_TOL:
                z = complex(z.real, 0.0)
            reps.append((z, len(members)))
        order = spectral_order([z for z, _ in reps])
        return [reps[k] for k in order]


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    eigen: EigenStructure
    projectors: np.ndarray  # shape (d, d, d); projectors[l] is B_{l+1}

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.eigen.eigenvalues

    def coefficients(self, i: int, j: int, kind: str = "pn_minus_pstar") -> np.ndarray:
        """Coefficients of lambda_l**n in component (i, j), for l = 2..d."""
        c = self.projectors[1:, i, j]
        if kind == "pn_minus_pstar":
            return c.copy()
        if kind == "successive_diff":
            return c * (self.eigenvalues[1:] - 1.0)
        raise ValueError(f"unknown sequence kind {kind!r}")

    def reconstruct(self, n: int) -> np.ndarray:
        """sum_{l>=2} lambda_l**n B_l, i.e. P**n - P* (real part)."""
        lam = self.eigenvalues[1:] ** n
        return np.real(np.tensordot(lam, self.projectors[1:], axes=1))


def eigen_decompose(P: StochasticMatrix | np.ndarray) -> EigenStructure:
    A = P.values if isinstance(P, StochasticMatrix) else np.asarray(P, dtype=float)
    try:
        w, V = np.linalg.eig(A)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    w = w.astype(complex)
    V = V.astype(complex)

    for k in range(len(w)):
        if abs(w[k].imag) <= REAL_AXIS_TOL:
            w[k] = complex(w[k].real, 0.0)
            v = V[:, k].real
            V[:, k] = v / np.linalg.norm(v)

    # exact conjugate symmetry: the Im > 0 member of each pair is authoritative
    paired = set()
    for k in np.flatnonzero(w.imag > 0):
        cands = [m for m in np.flatnonzero(w.imag < 0) if m not in paired]
        m = min(cands, key=lambda m: abs(w[m] - np.conj(w[k])))
        paired.add(m)
        w[m] = np.conj(w[k])
        V[:, m] = np.conj(V[:, k])

    order = spectral_order(list(w))
    w = w[order]
    V = V[:, order]

    norm = np.linalg.norm(A, 2)
    residuals = np.array([np.linalg.norm(A @ V[:, k] - w[k] * V[:, k]) for k in range(len(w))])
    if np.any(residuals > BACKWARD_ERROR_TOL * max(norm, 1.0)):
        raise ConvergenceFailure(f"eigenpair backward error {residuals.max():.3e} exceeds tolerance")

    simple = []
    for k in range(len(w)):
        gaps = [abs(w[k] - w[m]) for m in range(len(w)) if m != k]
        simple.append(min(gaps) > GAP_TOL if gaps else True)

    w.flags.writeable = False
    V.flags.writeable = False
    residuals.flags.writeable = False
    return EigenStructure(w, tuple(simple), residuals, V)


def spectral_projectors(P: StochasticMatrix | np.ndarray, eig: EigenStructure | None = None) -> SpectralDecomposition:
    if eig is None:
        eig = eigen_decompose(P)
    if not eig.all_simple:
        bad = [complex(z) for z, s in zip(eig.eigenvalues, eig.simple) if not s]
        raise MultipleEigenvalue(f"eigenvalues {bad} are not separated by more than {GAP_TOL}")
    V = eig.vectors
    W = np.linalg.inv(V)  # rows are left eigenvectors with u_l^T v_l = 1
    d = eig.d
    B = np.empty((d, d, d), dtype=complex)
    for k in range(d):
        B[k] = np.outer(V[:, k], W[k, :])
        if eig.eigenvalues[k].imag == 0.0:
            B[k] = B[k].real
    for k in range(d):
        if eig.eigenvalues[k].imag < 0:
            partner = [m for m in range(d) if eig.eigenvalues[m] == np.conj(eig.eigenvalues[k])]
            if partner:
                B[k] = np.conj(B[partner[0]])
    B.flags.writeable = False
    return SpectralDecomposition(eig, B)


def characteristic_coefficients(P: StochasticMatrix | np.ndarray) -> np.ndarray:
    """Non-leading coefficients a_1..a_d of det(zI - P) = z^d + a_1 z^(d-1) + ... + a_d."""
    A = P.values if isinstance(P, StochasticMatrix) else np.asarray(P, dtype=float)
    return np.poly(A)[1:]


# Total degree of Q_d; equals 2**d - 2 (checked symbolically in the tests).
_Q_DEGREE = {2: 2, 3: 6, 4: 14, 5: 30}


def _q(a, b):
    m = len(a)
    if m == 2:
        return a[0] * b[0] - a[1] - b[0] ** 2
    delta = a[0] - b[0]
    rho = a[1] - b[1] - delta * b[0]
    if rho == 0:
        return rho
    c = [a[k] - b[k] - delta * b[k - 1] for k in range(2, m - 1)] + [a[m - 1] - delta * b[m - 2]]
    return rho ** (1 + _Q_DEGREE[m - 1]) * _q(b, [ck / rho for ck in c])


def resultant_indicator(a: Sequence[complex], b: Sequence[complex], precision_bits: int = 256) -> complex:
    """Q_d(a, b): vanishes whenever the monic polynomials p_a and p_b share a root."""
    d = len(a)
    if len(b) != d - 1:
        raise ValueError("b must have exactly one coefficient fewer than a")
    if not 2 <= d <= 6:
        raise UnsupportedDegree(f"degree {d} outside 2..6")
    ctx = mp_context(precision_bits)
    aa = [ctx.mpc(complex(x)) for x in a]
    bb = [ctx.mpc(complex(x)) for x in b]
    return complex(_q(aa, bb))


def multiple_root_indicator(char_coeffs: Sequence[complex]) -> complex:
    """Q_d*(a) = Q_d(a, b) with b the coefficients of p_a'/d; zero at a multiple root."""
    d = len(char_coeffs)
    if not 2 <= d <= 6:
        raise UnsupportedDegree(f"degree {d} outside 2..6")
    b = [complex(char_coeffs[k - 1]) * (d - k) / d for k in range(1, d)]
    return resultant_indicator(char_coeffs, b)


def has_multiple_root(char_coeffs: Sequence[complex], tol: float = 1e-10) -> bool:
    return abs(multiple_root_indicator(char_coeffs)) <= tol
