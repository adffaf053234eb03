"""
Input validation utilities and the domain error hierarchy
"""

import json
import os
import re
from typing import List, Optional

import sympy


class IsodualError(Exception):
    """Base class for domain failures"""

    pass


class ValidationError(IsodualError):
    """Custom validation error"""

    pass


class NotUnimodular(IsodualError):
    pass


class NotIsodual(IsodualError):
    pass


class InvalidIndex(IsodualError):
    pass


class SplitFailed(IsodualError):
    pass


class NotInSiegelSpace(IsodualError):
    pass


class OutsideBall(IsodualError):
    pass


class NotInHalfPlane(IsodualError):
    pass


class NotMember(IsodualError):
    pass


class RankMismatch(IsodualError):
    pass


class SearchBudgetExceeded(IsodualError):
    pass


class NumericalInstability(IsodualError):
    pass


class UnknownConstant(IsodualError):
    pass


class NotFound(IsodualError):
    pass


_ROW_PATTERN = re.compile(r"\[([^\[\]]*)\]")


class InputValidator:
    """Input validation utilities"""

    @staticmethod
    def parse_int_matrix(text: str) -> sympy.ImmutableMatrix:
        """Parse '[[1,0],[0,1]]', '1 0; 0 1' or a file holding either"""
        if text is None or not str(text).strip():
            raise ValidationError("Matrix is required")

        text = str(text).strip()
        if os.path.isfile(text):
            with open(text, "r", encoding="utf-8") as handle:
                text = handle.read().strip()

        rows = InputValidator._split_rows(text)
        try:
            parsed = [[int(entry) for entry in row] for row in rows]
        except ValueError:
            raise ValidationError(f"Matrix entries must be integers: {text!r}")

        InputValidator.validate_square(parsed)
        return sympy.ImmutableMatrix(parsed)

    @staticmethod
    def parse_gram(text: str) -> List[List[str]]:
        """Parse a matrix of radical expressions into rows of strings"""
        if text is None or not str(text).strip():
            raise ValidationError("Gram matrix is required")

        text = str(text).strip()
        if os.path.isfile(text):
            with open(text, "r", encoding="utf-8") as handle:
                text = handle.read().strip()

        if text.startswith("{"):
            try:
                payload = json.loads(text)
            except json.JSONDecodeError as e:
                raise ValidationError(f"Invalid Gram JSON: {e}")
            rows = [[str(entry) for entry in row] for row in payload.get("rows", [])]
        else:
            rows = InputValidator._split_rows(text)

        InputValidator.validate_square(rows)
        return rows

    @staticmethod
    def parse_expression_rows(text: str, shape: Optional[tuple] = None) -> List[List[str]]:
        """Rows of expressions for a possibly rectangular matrix, checked against shape"""
        if text is None or not str(text).strip():
            raise ValidationError("Matrix is required")

        rows = InputValidator._split_rows(str(text).strip())
        if not rows or any(len(row) != len(rows[0]) for row in rows):
            raise ValidationError(f"Rows of unequal length in {text!r}")
        if shape is not None and (len(rows), len(rows[0])) != tuple(shape):
            raise ValidationError(f"Expected a {shape[0]}x{shape[1]} matrix, got {len(rows)}x{len(rows[0])}")
        return rows

    @staticmethod
    def parse_complex(text: str) -> complex:
        """Parse a complex number such as '0.5+0.866j' or '1/2+i*sqrt(3)/2'"""
        if text is None or not str(text).strip():
            raise ValidationError("Complex value is required")

        from .expressions import evaluate_complex

        return evaluate_complex(str(text).strip())

    @staticmethod
    def validate_square(rows: list) -> int:
        """Validate that rows describe a nonempty square matrix of rank at most 8"""
        n = len(rows)
        if n == 0:
            raise ValidationError("Matrix must not be empty")
        if n > 8:
            raise ValidationError("Rank must be at most 8")
        for row in rows:
            if len(row) != n:
                raise ValidationError("Matrix must be square")
        return n

    @staticmethod
    def validate_unimodular(M: sympy.MatrixBase) -> sympy.MatrixBase:
        """Validate that an integer matrix has determinant +-1"""
        d = M.det(method="bareiss")
        if d not in (1, -1):
            raise NotUnimodular(f"Determinant is {d}, expected +-1")
        return M

    @staticmethod
    def validate_bound(bound: Optional[int]) -> Optional[int]:
        """Validate a sup-norm search bound"""
        if bound is None:
            return None
        if bound < 1 or bound > 10:
            raise ValidationError("Search bound must be between 1 and 10")
        return bound

    @staticmethod
    def _split_rows(text: str) -> List[List[str]]:
        if text.startswith("["):
            inner = text[1:-1] if text.startswith("[[") else text
            rows = [
                [entry.strip() for entry in _split_top_level(match) if entry.strip()]
                for match in _ROW_PATTERN.findall(inner)
            ]
        else:
            rows = [
                [entry for entry in row.replace(",", " ").split()]
                for row in text.split(";")
                if row.strip()
            ]
        return rows


def _split_top_level(row: str) -> List[str]:
    """Split on commas that are not nested inside parentheses"""
    parts, depth, current = [], 0, []
    for char in row:
        if char == "(":
            depth += 1
        elif char == ")":
            depth -= 1
        if char == "," and depth == 0:
            parts.append("".join(current))
            current = []
        else:
            current.append(char)
    parts.append("".join(current))
    return parts
