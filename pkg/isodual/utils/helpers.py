"""
Helper utilities for rendering results and building JSON responses
"""

import json
import os
from functools import lru_cache
from typing import Any, Dict, List

import numpy as np
import sympy
from jsonschema import Draft202012Validator

from ..models import RealSignature, TableReport
from .validators import ValidationError

OUTPUT_SCHEMA_VERSION = 1
_SCHEMA_PATH = os.path.join(
    os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "static", "schemas", "output.schema.json"
)


def int_matrix_to_dict(M) -> Dict[str, Any]:
    """{"n": n, "rows": [[...]]} for an integer matrix"""
    M = sympy.Matrix(M)
    return {"n": M.rows, "rows": [[int(v) for v in row] for row in M.tolist()]}


def float_matrix_to_dict(A: np.ndarray) -> Dict[str, Any]:
    A = np.asarray(A, dtype=float)
    return {"n": int(A.shape[0]), "rows": [[float(v) for v in row] for row in A]}


def format_signature(s: RealSignature) -> str:
    """((p,q);g;{(k,l)→(a,b), ...})"""
    herm = ", ".join(f"({k},{l})→({a},{b})" for (k, l), (a, b) in s.herm)
    return f"(({s.p},{s.q});{s.g};{{{herm}}})"


def format_matrix(A: np.ndarray, digits: int = 12) -> str:
    A = np.asarray(A, dtype=float)
    return "\n".join("  ".join(f"{v: .{digits}f}" for v in row) for row in A)


def format_int_matrix(M) -> str:
    return "\n".join(" ".join(f"{int(v):3d}" for v in row) for row in sympy.Matrix(M).tolist())


def format_report(report: TableReport, verbose: bool = False) -> List[str]:
    """One line per row, checks listed only for failing rows unless verbose"""
    counts = report.counts()
    lines = [f"table {report.table}: {counts['PASS']} PASS, {counts['FAIL']} FAIL, {counts['SKIPPED']} SKIPPED"]
    for row in report.rows:
        line = f"  {row.row_id:<18} {row.name:<16} {row.status}"
        if row.reason and row.status != "PASS":
            line += f"  ({row.reason})"
        lines.append(line)
        if verbose or row.status == "FAIL":
            for key, value in row.checks.items():
                lines.append(f"      {key}: {value}")
    return lines


def build_response(verb: str, payload: Dict[str, Any]) -> Dict[str, Any]:
    return {"schema": f"isodual.{verb}/{OUTPUT_SCHEMA_VERSION}", **payload}


def _default(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, (sympy.Integer, sympy.Rational)):
        return int(value) if value.is_integer else float(value)
    raise TypeError(f"Cannot serialize {type(value).__name__}")


def dump_json(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, default=_default, sort_keys=True, indent=2, ensure_ascii=False)


@lru_cache(maxsize=1)
def _output_validator() -> Draft202012Validator:
    with open(_SCHEMA_PATH, "r", encoding="utf-8") as handle:
        return Draft202012Validator(json.load(handle))


def validate_output(payload: Dict[str, Any]) -> Dict[str, Any]:
    """Check a CLI response against the output schema"""
    document = json.loads(dump_json(payload))
    errors = sorted(_output_validator().iter_errors(document), key=lambda e: list(e.path))
    if errors:
        first = errors[0]
        location = "/".join(str(p) for p in first.path) or "<root>"
        raise ValidationError(f"Output does not match {payload.get('schema')}: {location}: {first.message}")
    return document
