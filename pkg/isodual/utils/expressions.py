"""
Radical-expression grammar for Gram entries, split matrices and closed-form constants
"""

import logging
from functools import lru_cache
from typing import Dict, List, Sequence

import numpy as np
import sympy
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations

from .validators import UnknownConstant, ValidationError

logger = logging.getLogger(__name__)

_x = sympy.Symbol("x")
_TRANSFORMATIONS = standard_transformations + (convert_xor,)


@lru_cache(maxsize=None)
def psi_root() -> sympy.Expr:
    """Largest real root of 63x^4 - 64x^3 - 116x^2 + 128x - 36 (about 1.5101)"""
    quartic = sympy.Poly(63 * _x**4 - 64 * _x**3 - 116 * _x**2 + 128 * _x - 36, _x)
    return quartic.real_roots()[-1]


def _named_constants() -> Dict[str, sympy.Expr]:
    sqrt = sympy.sqrt
    psi = psi_root()
    psi1 = (-198 + 404 * psi + 65 * psi**2 - 126 * psi**3) / 144
    return {
        "alpha": (1 + sqrt(2)) / 2,
        "beta": sympy.Rational(2, 5) * sqrt(5 + 2 * sqrt(5)),
        "gam": sqrt(2 - sqrt(2)),
        "delta": 1 + 1 / sqrt(3),
        "epsilon": 2 * sqrt((5 + 4 * sqrt(3)) / 23),
        "zeta": (1 + sqrt(13)) / 3,
        "eta": sqrt(1 + 2 / sqrt(3)),
        "nu": sqrt(4 + 2 * sqrt(2)) / 2,
        "phi": 1 + (sqrt(6) - sqrt(2)) / 2,
        "omega": (1 + sqrt(2) + sqrt(4 + 2 * sqrt(2))) / 4,
        "psi": psi,
        "psi1": psi1,
        "psi2": 2 * psi - 2 * psi1 - 1,
    }


@lru_cache(maxsize=None)
def _namespace() -> Dict[str, object]:
    namespace = {
        "sqrt": sympy.sqrt,
        "root": sympy.root,
        "cos": sympy.cos,
        "sin": sympy.sin,
        "pi": sympy.pi,
        "I": sympy.I,
        "i": sympy.I,
        "j": sympy.I,
        "Rational": sympy.Rational,
        "Integer": sympy.Integer,
        "Float": sympy.Float,
    }
    namespace.update(_named_constants())
    return namespace


def named_constant(name: str) -> sympy.Expr:
    """Return the closed form registered under name"""
    constants = _named_constants()
    if name not in constants:
        raise UnknownConstant(f"Unknown constant: {name}")
    return constants[name]


def parse(text: str) -> sympy.Expr:
    """Parse a radical expression using only whitelisted names"""
    source = str(text).strip()
    if not source:
        raise ValidationError("Empty expression")

    try:
        expr = parse_expr(
            source,
            local_dict=dict(_namespace()),
            global_dict={"__builtins__": {}, "Integer": sympy.Integer, "Float": sympy.Float,
                         "Rational": sympy.Rational, "Symbol": sympy.Symbol},
            transformations=_TRANSFORMATIONS,
        )
    except Exception as e:
        raise ValidationError(f"Cannot parse expression {source!r}: {e}")

    free = sorted(str(symbol) for symbol in getattr(expr, "free_symbols", set()))
    if free:
        raise UnknownConstant(f"Unknown name(s) in {source!r}: {', '.join(free)}")
    return sympy.sympify(expr)


def evaluate(text: str, dps: int = 50) -> float:
    """Evaluate a real radical expression to a float"""
    value = complex(parse(text).evalf(dps))
    if abs(value.imag) > 1e-30:
        raise ValidationError(f"Expression {text!r} is not real")
    return value.real


def same_number(first: str, second: str) -> bool:
    """Exact equality of two algebraic closed forms, through the minimal polynomial of their difference"""
    difference = sympy.expand(parse(first) - parse(second))
    if difference == 0:
        return True
    return sympy.minimal_polynomial(difference, _x) == _x


def evaluate_complex(text: str, dps: int = 50) -> complex:
    """Evaluate an expression that may involve i"""
    return complex(parse(text).evalf(dps))


def matrix_from_expressions(rows: Sequence[Sequence[str]], dps: int = 50) -> np.ndarray:
    """Evaluate a matrix of expression strings to a float array"""
    return np.array([[evaluate(entry, dps) for entry in row] for row in rows], dtype=float)


def scaled_rows(scale: str, rows: Sequence[Sequence[str]]) -> List[List[str]]:
    """Distribute a common scale factor over every entry"""
    return [[f"({scale})*({entry})" for entry in row] for row in rows]
