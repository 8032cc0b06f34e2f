"""Matrix file parsing and seed/report serialization.

Two input formats are accepted:

* plain text: three whitespace-separated rows of three numbers, plus an
  optional fourth row ``d: d1 d2 d3``;
* JSON: an object with key ``b`` (nine numbers, row-major) and optional
  ``d`` (three numbers).
"""

from __future__ import annotations

import json

import numpy as np

from .errors import CyclicFanError
from .matrices import ExchangeMatrix, validate
from .tolerances import EPS_EQ, EPS_SIGN


class MatrixFormatError(CyclicFanError):
    pass


def parse_matrix(text: str, eps_sign: float = EPS_SIGN, eps_eq: float = EPS_EQ) -> ExchangeMatrix:
    stripped = text.strip()
    if not stripped:
        raise MatrixFormatError("empty matrix document")
    if stripped[0] == "{":
        try:
            doc = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise MatrixFormatError(f"bad JSON matrix document: {exc}") from exc
        if "b" not in doc:
            raise MatrixFormatError("JSON matrix document needs key 'b'")
        flat = np.asarray(doc["b"], dtype=float).reshape(3, 3)
        d = np.asarray(doc["d"], dtype=float) if "d" in doc and doc["d"] is not None else None
        return validate(flat, d, eps_sign=eps_sign, eps_eq=eps_eq)

    rows = []
    d = None
    for line in stripped.splitlines():
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if line.lower().startswith("d:"):
            d = [float(tok) for tok in line[2:].split()]
            continue
        rows.append([float(tok) for tok in line.split()])
    if len(rows) != 3 or any(len(r) != 3 for r in rows):
        raise MatrixFormatError("expected three rows of three numbers")
    if d is not None and len(d) != 3:
        raise MatrixFormatError("row 'd:' must carry three numbers")
    return validate(np.array(rows), d, eps_sign=eps_sign, eps_eq=eps_eq)


def load_matrix(path: str, eps_sign: float = EPS_SIGN, eps_eq: float = EPS_EQ) -> ExchangeMatrix:
    with open(path, encoding="utf-8") as fh:
        return parse_matrix(fh.read(), eps_sign, eps_eq)


def format_matrix(mat: ExchangeMatrix, with_d: bool = True) -> str:
    lines = [" ".join(_fmt(x) for x in row) for row in mat.b]
    if with_d and not np.allclose(mat.d, 1.0):
        lines.append("d: " + " ".join(_fmt(x) for x in mat.d))
    return "\n".join(lines)


def _fmt(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))
