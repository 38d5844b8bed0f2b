"""Command-line interface: ``benford-chain {analyze,simulate,seqdigits,sample,contfrac,detect}``.

Exit codes: 0 nonresonant (or success), 2 resonant or undecided,
3 chain not irreducible/aperiodic, 1 input or numerical error.
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .chains import StochasticMatrix, classify, require_ergodic, validate_stochastic
from .contfrac import CLOSED_FORMS, convergents, expand, expand_closed_form, irrationality_profile
from .errors import BenfordChainError, ChainStructureError, TooShort, UnknownStateLabel
from .randomchain import default_workers, random_chain_experiment
from .report import (default_decimals, dumps, envelope, read_matrix, write_frequency_csv,
                     write_series_csv)
from .resonance import DEFAULT_EPS, DEFAULT_QMAX, ResonanceStatus, ResonanceVerdict, nonresonance_verdict
from .sequences import (CLASSIC_KINDS, MAX_FALLBACK_TERMS, VERDICT_NOTES, ComponentVerdict,
                        LogSignificandSeries, classic_digit_table, component_log_series,
                        component_verdict, fallback_component_verdict, fallback_log_series)
from .significand import CHI2_CRITICAL, chi_squared
from .spectral import KINDS, eigen_decompose, spectral_projectors

EXIT_OK, EXIT_ERROR, EXIT_RESONANT, EXIT_STRUCTURE = 0, 1, 2, 3
KIND_FLAGS = {"pn-minus-pstar": "pn_minus_pstar", "successive-diff": "successive_diff"}
# the estimated chain "grossly" fails when some component exceeds this multiple of the 1% critical value
GROSS_FAILURE_FACTOR = 5.0


def _status_exit(v: ResonanceVerdict) -> int:
    return EXIT_OK if v.status is ResonanceStatus.NONRESONANT else EXIT_RESONANT


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _columns(d: int) -> list[tuple[int, int]]:
    return [(i, j) for j in range(d) for i in range(d)]


def component_series(P: StochasticMatrix, kind: str, N: int, start: int = 1) -> list[LogSignificandSeries]:
    """All d*d series, column-major, via the spectral path when the spectrum is simple."""
    eig = eigen_decompose(P)
    if eig.all_simple:
        dec = spectral_projectors(P, eig)
        return [component_log_series(dec, i, j, kind, N, start) for i, j in _columns(P.d)]
    if N + start - 1 > MAX_FALLBACK_TERMS:
        raise BenfordChainError(f"repeated eigenvalues: the extended-precision path is limited to n <= {MAX_FALLBACK_TERMS}")
    return [fallback_log_series(P, i, j, kind, N, start) for i, j in _columns(P.d)]


def analyze_matrix(P: StochasticMatrix, qmax: int = DEFAULT_QMAX, eps: float = DEFAULT_EPS,
                   tables_n: int | None = None) -> tuple[dict, int]:
    cls = classify(P)
    payload: dict = {"matrix": {"d": P.d, "rows": P.to_rows()}, "classification": cls.to_dict()}
    try:
        require_ergodic(P)
    except ChainStructureError as exc:
        payload["error"] = {"type": type(exc).__name__, "message": str(exc)}
        return envelope("analysis", payload), EXIT_STRUCTURE
    eig = eigen_decompose(P)
    verdict = nonresonance_verdict(P, qmax, eps, eig=eig)
    payload["eigenvalues"] = [complex(z) for z in eig.eigenvalues]
    payload["simple_spectrum"] = eig.all_simple
    payload["resonance"] = verdict.to_dict()
    comps: dict = {}
    dec = spectral_projectors(P, eig) if eig.all_simple else None
    for kind in KINDS:
        entries = []
        for i, j in _columns(P.d):
            if dec is not None:
                v = component_verdict(dec, verdict, i, j, kind)
            else:
                v = fallback_component_verdict(P, verdict, i, j, kind)
            entries.append({"component": f"({i + 1},{j + 1})", "verdict": v.value, "note": VERDICT_NOTES[v]})
        comps[kind] = entries
    payload["components"] = comps
    payload["chain_benford_predicted"] = all(
        e["verdict"] in (ComponentVerdict.BENFORD_PREDICTED.value, ComponentVerdict.EVENTUALLY_ZERO.value)
        for k in comps for e in comps[k])
    if tables_n:
        tables = {}
        for kind in KINDS:
            tables[kind] = {}
            for s in component_series(P, kind, tables_n):
                t = s.digit_table()
                tables[kind][s.label] = {"counts": list(t.counts), "zero_terms": s.zero_count,
                                         "chi_squared": chi_squared(t) if t.total else None}
        payload["tables"] = {"N": tables_n, **tables}
    return envelope("analysis", payload), _status_exit(verdict)


def cmd_analyze(args) -> int:
    P = read_matrix(args.matrix)
    report, code = analyze_matrix(P, args.qmax, args.eps, args.tables)
    _emit(dumps(report), args.out)
    return code


def cmd_simulate(args) -> int:
    P = read_matrix(args.matrix)
    require_ergodic(P)
    kinds = list(KIND_FLAGS.values()) if args.kind == "both" else [KIND_FLAGS[args.kind]]
    decimals = None if args.full_precision else default_decimals(args.n)
    outdir = Path(args.out) if args.out else None
    if outdir:
        outdir.mkdir(parents=True, exist_ok=True)
    for kind in kinds:
        series = component_series(P, kind, args.n, args.start)
        text = write_frequency_csv([(s.label, s.digit_table()) for s in series], decimals)
        stem = Path(args.matrix).stem
        if outdir:
            (outdir / f"{stem}_{kind}_N{args.n}.csv").write_text(text)
        else:
            sys.stdout.write(f"# {kind} N={args.n}\n" if len(kinds) > 1 else "")
            sys.stdout.write(text)
        if args.series:
            sdir = Path(args.series)
            sdir.mkdir(parents=True, exist_ok=True)
            for s in series:
                (sdir / f"{stem}_{kind}_{s.component[0] + 1}{s.component[1] + 1}.csv").write_text(write_series_csv(s))
    return EXIT_OK


def cmd_seqdigits(args) -> int:
    kinds = CLASSIC_KINDS if args.kind == "all" else (args.kind,)
    labels = {"pow2": "2^n", "factorial": "n!", "fibonacci": "F_n"}
    cols = [(labels[k], classic_digit_table(k, args.n)) for k in kinds]
    decimals = None if args.full_precision else default_decimals(args.n)
    _emit(write_frequency_csv(cols, decimals), args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    workers = args.workers if args.workers else default_workers()
    rep = random_chain_experiment(args.d, args.count, args.n, args.seed, args.qmax, args.eps, workers)
    _emit(dumps(envelope("sample", rep.to_dict())), args.out)
    return EXIT_OK


def cmd_contfrac(args) -> int:
    if args.expr:
        cf = expand_closed_form(args.expr, args.terms)
    elif args.exact:
        cf = expand(Fraction(args.value), args.terms)
    else:
        cf = expand(float(args.value), args.terms)
    if args.json:
        prof = irrationality_profile(cf) if cf.partial_quotients else None
        payload = {
            "source": cf.source_value, "a0": cf.a0, "partial_quotients": list(cf.partial_quotients),
            "certified_terms": cf.precision_note, "requested_terms": cf.requested_terms,
            "terminated": cf.exact,
            "convergents": [f"{c.p}/{c.q}" for c in convergents(cf)],
        }
        if prof:
            payload["profile"] = {"max_quotient": prof.max_quotient, "argmax_index": prof.argmax_index,
                                  "geometric_mean": prof.geometric_mean}
        _emit(dumps(envelope("contfrac", payload)), None)
    else:
        lines = [f"{cf.source_value} = {cf}"]
        if cf.exhausted:
            lines.append(f"only {cf.precision_note} of {cf.requested_terms} partial quotients are certified "
                         "at the input precision")
        if cf.partial_quotients:
            prof = irrationality_profile(cf)
            lines.append(f"max partial quotient {prof.max_quotient} at n = {prof.argmax_index}; "
                         f"geometric mean {prof.geometric_mean:.6f}")
        _emit("\n".join(lines), None)
    return EXIT_OK


def read_state_sequence(path: str | Path, d: int) -> np.ndarray:
    tokens = Path(path).read_text().replace(",", " ").split()
    try:
        labels = np.array([int(t) for t in tokens], dtype=np.int64)
    except ValueError as exc:
        raise UnknownStateLabel(f"non-integer state label: {exc}") from exc
    bad = labels[(labels < 1) | (labels > d)]
    if bad.size:
        raise UnknownStateLabel(f"label {int(bad[0])} outside 1..{d}")
    if labels.size < 100 * d * d:
        raise TooShort(f"{labels.size} observations; need at least {100 * d * d} for d = {d}")
    return labels - 1


def estimate_chain(states: np.ndarray, d: int) -> tuple[StochasticMatrix, np.ndarray, list[str]]:
    """Maximum-likelihood transition matrix from one observed path (exact rational entries)."""
    counts = np.zeros((d, d), dtype=np.int64)
    np.add.at(counts, (states[:-1], states[1:]), 1)
    notes = []
    rows = []
    for i in range(d):
        tot = int(counts[i].sum())
        if tot == 0:
            notes.append(f"state {i + 1} is never left in the sample; treated as absorbing")
            rows.append([Fraction(int(i == j)) for j in range(d)])
        else:
            rows.append([Fraction(int(c), tot) for c in counts[i]])
    return validate_stochastic(rows), counts, notes


def detect_report(states: np.ndarray, d: int, N: int, qmax: int = DEFAULT_QMAX,
                  eps: float = DEFAULT_EPS) -> tuple[dict, int]:
    P, counts, notes = estimate_chain(states, d)
    payload: dict = {
        "observations": int(states.size),
        "transition_counts": counts.tolist(),
        "estimated_matrix": [[float(v) for v in row] for row in P.exact],
        "classification": classify(P).to_dict(),
        "diagnostics": notes,
        "interpretation": ("This is a partial negative test: a gross goodness-of-fit failure of the "
                           "estimated successive differences to Benford's law is evidence against "
                           "Markov behaviour, while a pass is not proof that the data are Markov."),
    }
    try:
        require_ergodic(P)
    except ChainStructureError as exc:
        payload["error"] = {"type": type(exc).__name__, "message": str(exc)}
        payload["flag"] = "NOT-APPLICABLE"
        return envelope("detection", payload), EXIT_STRUCTURE
    eig = eigen_decompose(P)
    verdict = nonresonance_verdict(P, qmax, eps, eig=eig)
    payload["resonance"] = verdict.to_dict()
    chis = {}
    for s in component_series(P, "successive_diff", N):
        t = s.digit_table()
        chis[s.label] = chi_squared(t) if t.total else None
    payload["N"] = N
    payload["successive_diff_chi_squared"] = chis
    threshold = GROSS_FAILURE_FACTOR * CHI2_CRITICAL[0.01]
    payload["gross_failure_threshold"] = threshold
    worst = max((c for c in chis.values() if c is not None), default=0.0)
    suspect = verdict.status is ResonanceStatus.NONRESONANT and worst > threshold
    payload["flag"] = "NON-MARKOV-SUSPECT" if suspect else "NO-EVIDENCE-AGAINST-MARKOV"
    if verdict.status is not ResonanceStatus.NONRESONANT:
        payload["diagnostics"].append("estimated chain is not certified nonresonant; the test makes no claim")
    return envelope("detection", payload), _status_exit(verdict)


def cmd_detect(args) -> int:
    states = read_state_sequence(args.sequence, args.states)
    report, code = detect_report(states, args.states, args.n, args.qmax, args.eps)
    _emit(dumps(report), args.out)
    return code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="benford-chain", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def bounds(p):
        p.add_argument("--qmax", type=int, default=DEFAULT_QMAX, help="largest integer coefficient searched")
        p.add_argument("--eps", type=float, default=DEFAULT_EPS, help="residual accepted as an exact relation")

    p = sub.add_parser("analyze", help="classify a chain and predict Benford behaviour per component")
    p.add_argument("matrix")
    bounds(p)
    p.add_argument("--tables", type=int, metavar="N", help="also tabulate first digits of the first N terms")
    p.add_argument("--json", action="store_true", help="accepted for symmetry; output is always JSON")
    p.add_argument("--out")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="first-digit frequency tables of the component sequences")
    p.add_argument("matrix")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--kind", choices=[*KIND_FLAGS, "both"], default="pn-minus-pstar")
    p.add_argument("--start", type=int, default=1, help="first exponent n (default 1)")
    p.add_argument("--full-precision", action="store_true")
    p.add_argument("--out", help="directory for CSV files (default: stdout)")
    p.add_argument("--series", help="directory for per-component series CSVs")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("seqdigits", help="first-digit frequencies of 2^n, n! and Fibonacci numbers")
    p.add_argument("--kind", choices=[*CLASSIC_KINDS, "all"], default="all")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--full-precision", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_seqdigits)

    p = sub.add_parser("sample", help="Monte-Carlo study of random chains")
    p.add_argument("--d", type=int, default=3)
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--n", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=42)
    bounds(p)
    p.add_argument("--workers", type=int, help="processes (default: $BENFORD_CHAIN_THREADS or 1)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("contfrac", help="certified continued-fraction expansion")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--value")
    g.add_argument("--expr", choices=sorted(CLOSED_FORMS))
    p.add_argument("--terms", type=int, default=50)
    p.add_argument("--exact", action="store_true", help="treat --value as an exact decimal")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_contfrac)

    p = sub.add_parser("detect", help="goodness-of-fit check of a state sequence against Markov behaviour")
    p.add_argument("sequence")
    p.add_argument("--states", type=int, required=True)
    p.add_argument("--n", type=int, default=1000)
    bounds(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_detect)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ChainStructureError as exc:
        payload = {"error": {"type": type(exc).__name__, "message": str(exc)}}
        if exc.classification is not None:
            payload["classification"] = exc.classification.to_dict()
        sys.stdout.write(dumps(envelope("error", payload)) + "\n")
        return EXIT_STRUCTURE
    except (BenfordChainError, OSError, ValueError, ArithmeticError) as exc:
        sys.stdout.write(dumps(envelope("error", {"error": {"type": type(exc).__name__, "message": str(exc)}})) + "\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
