"""Random stochastic matrices and the Monte-Carlo nonresonance / goodness-of-fit experiment.

Sample k of a run with seed s draws from Generator(Philox(SeedSequence(s, spawn_key=(k,)))),
so a sample depends only on (s, k): results do not change with the number of workers.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .chains import StochasticMatrix, classify, validate_stochastic
from .errors import BenfordChainError
from .resonance import DEFAULT_EPS, DEFAULT_QMAX, ResonanceStatus, nonresonance_verdict
from .sequences import all_component_series
from .significand import CHI2_CRITICAL, chi_squared
from .spectral import eigen_decompose, spectral_projectors

THREADS_ENV = "BENFORD_CHAIN_THREADS"


def sample_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def sample_simplex_row(d: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform point of the open (d-1)-simplex: normalised i.i.d. standard exponentials."""
    if d < 2:
        raise ValueError("d must be at least 2")
    e = rng.standard_exponential(d)
    return e / e.sum()


def sample_chain(d: int, rng: np.random.Generator) -> StochasticMatrix:
    return validate_stochastic([sample_simplex_row(d, rng) for _ in range(d)])


def counterexample_chain(x: float, y: float, z: float) -> StochasticMatrix:
    """Three-state family with rows summing to 1 that always has eigenvalue 1/10.

    (1/40) [[X+4, X, 36-2X], [Y, Y+4, 36-2Y], [Z+2, Z+2, 36-2Z]] for X, Y, Z in (0, 18).
    """
    X, Y, Z = (Fraction(repr(float(v))) for v in (x, y, z))
    rows = [[X + 4, X, 36 - 2 * X], [Y, Y + 4, 36 - 2 * Y], [Z + 2, Z + 2, 36 - 2 * Z]]
    return validate_stochastic([[v / 40 for v in r] for r in rows])


def sample_counterexample(rng: np.random.Generator) -> StochasticMatrix:
    x, y, z = rng.uniform(0.0, 18.0, size=3)
    return counterexample_chain(x, y, z)


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SampleRecord:
    index: int
    resonance: str
    witness_kind: str | None
    simple_spectrum: bool
    chi_squared: tuple[float | None, ...]  # per component, column-major; None if identically zero
    passed: bool | None  # every nonzero component within the alpha = 0.01 critical value
    error: str | None = None


@dataclass(frozen=True)
class ChainSampleReport:
    d: int
    count: int
    N: int
    seed: int
    qmax: int
    eps: float
    records: tuple[SampleRecord, ...]

    @property
    def fraction_nonresonant(self) -> float:
        return sum(r.resonance == ResonanceStatus.NONRESONANT.value for r in self.records) / self.count

    @property
    def fraction_passing(self) -> float:
        return sum(bool(r.passed) for r in self.records) / self.count

    @property
    def fraction_passing_among_nonresonant(self) -> float:
        nr = [r for r in self.records if r.resonance == ResonanceStatus.NONRESONANT.value]
        return sum(bool(r.passed) for r in nr) / len(nr) if nr else float("nan")

    def to_dict(self) -> dict:
        return {
            "d": self.d, "count": self.count, "N": self.N, "seed": self.seed,
            "bounds": {"qmax": self.qmax, "eps": self.eps},
            "fraction_nonresonant": self.fraction_nonresonant,
            "fraction_passing": self.fraction_passing,
            "fraction_passing_among_nonresonant": self.fraction_passing_among_nonresonant,
            "chi2_critical_alpha_0.01": CHI2_CRITICAL[0.01],
            "records": [asdict(r) for r in self.records],
        }


def _one_sample(args: tuple[int, int, int, int, int, float]) -> SampleRecord:
    d, seed, index, N, qmax, eps = args
    P = sample_chain(d, sample_rng(seed, index))
    try:
        if not classify(P).has_unique_limit:
            return SampleRecord(index, "not_ergodic", None, False, (), None)
        eig = eigen_decompose(P)
        verdict = nonresonance_verdict(P, qmax, eps, eig=eig)
        cert = verdict.certificate
        if not eig.all_simple:
            return SampleRecord(index, verdict.status.value, cert.kind if cert else None, False, (), None)
        dec = spectral_projectors(P, eig)
        chis: list[float | None] = []
        for s in all_component_series(dec, "pn_minus_pstar", N):
            table = s.digit_table()
            chis.append(chi_squared(table) if table.total else None)
        passed = all(c is None or c <= CHI2_CRITICAL[0.01] for c in chis)
        return SampleRecord(index, verdict.status.value, cert.kind if cert else None, True, tuple(chis), passed)
    except BenfordChainError as exc:
        return SampleRecord(index, "error", None, False, (), None, f"{type(exc).__name__}: {exc}")


def random_chain_experiment(d: int = 3, count: int = 1000, N: int = 10_000, seed: int = 42,
                        qmax: int = DEFAULT_QMAX, eps: float = DEFAULT_EPS,
                        workers: int | None = None) -> ChainSampleReport:
    """Sample ``count`` chains with i.i.d. uniform simplex rows; test each for nonresonance
    and compare the first N terms of every component of P**n - P* with Benford's law."""
    if not 2 <= d <= 6:
        raise ValueError("d must be in 2..6")
    if not 1 <= count <= 10_000:
        raise ValueError("count must be in 1..10000")
    if not 1 <= N <= 100_000:
        raise ValueError("N must be in 1..100000")
    workers = default_workers() if workers is None else max(1, workers)
    jobs = [(d, seed, k, N, qmax, eps) for k in range(count)]
    if workers == 1:
        records = [_one_sample(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_one_sample, jobs, chunksize=max(1, count // (4 * workers))))
    records.sort(key=lambda r: r.index)
    return ChainSampleReport(d, count, N, seed, qmax, eps, tuple(records))


def simulate_path(P: StochasticMatrix, length: int, rng: np.random.Generator, start: int = 0) -> np.ndarray:
    """State sequence X_0 .. X_{length-1} (0-based labels)."""
    cum = np.cumsum(P.values, axis=1)
    cum[:, -1] = 1.0
    u = rng.random(length)
    out = np.empty(length, dtype=np.int64)
    s = start
    for t in range(length):
        out[t] = s
        s = int(np.searchsorted(cum[s], u[t], side="right"))
    return out
