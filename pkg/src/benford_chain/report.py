"""File formats: matrix input, JSON reports, frequency-table and series CSVs."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .chains import StochasticMatrix, validate_stochastic
from .errors import MatrixValidationError
from .sequences import LogSignificandSeries
from .significand import BENFORD_FIRST, DigitFrequencyTable

SCHEMA = "benford-chain/1"


# -- matrices ------------------------------------------------------------------

def parse_matrix(text: str, fmt: str | None = None) -> StochasticMatrix:
    """CSV (one row per line, '#' comments) or JSON {"d": d, "rows": [[...], ...]}.

    Numbers are kept as decimal strings so 0.1 means exactly 1/10.
    """
    stripped = text.lstrip()
    if fmt == "json" or (fmt is None and stripped.startswith("{")):
        try:
            obj = json.loads(text, parse_float=str, parse_int=str)
        except json.JSONDecodeError as exc:
            raise MatrixValidationError(f"invalid JSON: {exc}") from exc
        if not isinstance(obj, dict) or "rows" not in obj:
            raise MatrixValidationError('JSON matrix must be an object with a "rows" array')
        rows = obj["rows"]
        if "d" in obj and int(obj["d"]) != len(rows):
            raise MatrixValidationError(f'"d" = {obj["d"]} but {len(rows)} rows given')
        return validate_stochastic([[str(v) for v in r] for r in rows])
    rows = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            rows.append([v.strip() for v in line.replace(";", ",").split(",") if v.strip()])
    return validate_stochastic(rows)


def read_matrix(path: str | Path) -> StochasticMatrix:
    p = Path(path)
    fmt = "json" if p.suffix.lower() == ".json" else None
    return parse_matrix(p.read_text(), fmt)


# -- JSON ------------------------------------------------------------------------

def _num(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    if x == int(x) and abs(x) < 2 ** 53:
        return f"{x:.1f}"
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits; complex -> {"re", "im"}."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps({"re": float(obj.real), "im": float(obj.imag)}, indent, _level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, Mapping):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(not isinstance(v, (Mapping, list, tuple, np.ndarray, complex)) for v in seq):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in seq) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in seq) + "\n" + end + "]"
    if hasattr(obj, "value"):  # enums
        return dumps(obj.value, indent, _level)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def envelope(kind: str, payload: dict) -> dict:
    return {"schema": SCHEMA, "kind": kind, **payload}


# -- frequency tables --------------------------------------------------------------

def default_decimals(N: int) -> int:
    """3 decimals at N = 1000, 4 at N = 10000."""
    return max(3, int(math.floor(math.log10(N))))


def write_frequency_csv(columns: Sequence[tuple[str, DigitFrequencyTable]], decimals: int | None) -> str:
    """Digits as rows, one column per table, Benford reference last.  decimals=None keeps full precision."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["digit"] + [name for name, _ in columns] + ["Benford"])
    freqs = [t.frequencies if t.total else np.full(9, np.nan) for _, t in columns]
    for d in range(9):
        row = [str(d + 1)]
        for f in freqs:
            row.append("" if math.isnan(f[d]) else (repr(float(f[d])) if decimals is None else f"{f[d]:.{decimals}f}"))
        row.append(repr(float(BENFORD_FIRST[d])) if decimals is None else f"{BENFORD_FIRST[d]:.5f}")
        w.writerow(row)
    return buf.getvalue()


def read_frequency_csv(text: str) -> dict[str, list[float | None]]:
    r = list(csv.reader(io.StringIO(text)))
    header, body = r[0], r[1:]
    if header[0] != "digit" or len(body) != 9:
        raise ValueError("not a digit-frequency table")
    return {name: [float(row[c]) if row[c] else None for row in body] for c, name in enumerate(header) if c > 0}


# -- series -------------------------------------------------------------------------

SERIES_COLUMNS = ("n", "log10_abs", "is_zero", "significand", "D1")


def write_series_csv(s: LogSignificandSeries) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SERIES_COLUMNS)
    sig = s.significands()
    d1 = s.first_digits()
    for k in range(len(s)):
        if s.is_zero[k]:
            w.writerow([int(s.n[k]), "", 1, "", 0])
        else:
            lg = repr(float(s.characteristic[k] + s.fraction[k]))
            w.writerow([int(s.n[k]), lg, 0, repr(float(sig[k])), int(d1[k])])
    return buf.getvalue()


def read_series_csv(text: str) -> list[tuple[int, float | None, bool, float | None, int]]:
    r = list(csv.reader(io.StringIO(text)))
    if tuple(r[0]) != SERIES_COLUMNS:
        raise ValueError("not a series CSV")
    out = []
    for row in r[1:]:
        out.append((int(row[0]), float(row[1]) if row[1] else None, row[2] == "1",
                    float(row[3]) if row[3] else None, int(row[4])))
    return out
