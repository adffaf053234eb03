"""
Exact integer and rational matrix arithmetic
"""

import itertools
import logging
import random
from dataclasses import dataclass, field
from functools import lru_cache, reduce
from math import gcd
from typing import List, Optional, Sequence

import sympy
from sympy import ImmutableMatrix, Poly, ZZ
from sympy.matrices.normalforms import invariant_factors, smith_normal_decomp
from sympy.polys.domains import GF
from sympy.polys.matrices import DomainMatrix

from ..utils.validators import NotUnimodular, SearchBudgetExceeded, ValidationError

logger = logging.getLogger(__name__)

x = sympy.Symbol("x")

# phi(k) <= 8 implies k <= 30
_MAX_CONDUCTOR = 30


@dataclass
class SylvesterResult:
    """Integer solutions of F = R F'"""

    R: ImmutableMatrix
    basis: List[ImmutableMatrix]
    generic_det: Optional[sympy.Expr] = None
    coordinates: List[sympy.Symbol] = field(default_factory=list)
    sampled_dets: List[int] = field(default_factory=list)
    unimodular: List[ImmutableMatrix] = field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def det_gcd(self) -> int:
        """gcd of the nonzero sampled determinants (0 when none were sampled)"""
        return reduce(gcd, (abs(d) for d in self.sampled_dets if d), 0)


def as_int_matrix(M) -> ImmutableMatrix:
    """Coerce nested lists or a sympy matrix to an immutable integer matrix"""
    matrix = ImmutableMatrix(M)
    if not matrix.is_square:
        raise ValidationError("Matrix must be square")
    for entry in matrix:
        if not (entry.is_Integer):
            raise ValidationError(f"Entry {entry} is not an integer")
    return matrix


def det(M) -> int:
    """Exact determinant of an integer matrix (sympy matrix or nested lists) over ZZ"""
    rows = M if isinstance(M, list) else ImmutableMatrix(M).tolist()
    rows = [[int(entry) for entry in row] for row in rows]
    if not rows:
        return 1
    return int(DomainMatrix.from_list(rows, ZZ).det())


def is_unimodular(M) -> bool:
    return abs(det(M)) == 1


def dual_inverse(F) -> ImmutableMatrix:
    """F^vee = (F')^{-1}, exact"""
    F = as_int_matrix(F)
    d = det(F)
    if d not in (1, -1):
        raise NotUnimodular(f"|det F| = {abs(d)}, expected 1")
    # inverse of a unimodular matrix is d * adj
    return ImmutableMatrix(F.T.adjugate(method="bareiss") * d)


def int_matrix_power(M, e: int) -> ImmutableMatrix:
    M = ImmutableMatrix(M)
    if e < 0:
        d = det(M)
        if d not in (1, -1):
            raise NotUnimodular("Negative powers need a unimodular matrix")
        M = ImmutableMatrix(M.adjugate(method="bareiss") * d)
        e = -e
    result = ImmutableMatrix.eye(M.rows)
    base = M
    while e:
        if e & 1:
            result = result * base
        base = base * base
        e >>= 1
    return ImmutableMatrix(result)


def char_poly(M) -> Poly:
    """det(xI - M) over ZZ"""
    M = ImmutableMatrix(M)
    return Poly(M.charpoly(x).as_expr(), x, domain=ZZ)


def poly_coeffs(p: Poly) -> List[int]:
    """Ascending coefficient list"""
    return [int(c) for c in reversed(p.all_coeffs())]


@lru_cache(maxsize=None)
def cyclotomic(k: int) -> Poly:
    """k-th cyclotomic polynomial over ZZ"""
    if k < 1:
        raise ValidationError("Conductor must be positive")
    return Poly(sympy.cyclotomic_poly(k, x), x, domain=ZZ)


def eval_poly_at_matrix(p: Poly, M) -> ImmutableMatrix:
    """Horner evaluation of an integer polynomial at a square matrix"""
    M = ImmutableMatrix(M)
    identity = ImmutableMatrix.eye(M.rows)
    result = ImmutableMatrix.zeros(M.rows, M.rows)
    for c in p.all_coeffs():
        result = result * M + identity * int(c)
    return ImmutableMatrix(result)


def minimal_cyclotomic_factors(R) -> Optional[List[int]]:
    """Conductors k with Phi_k dividing the minimal polynomial, or None for infinite order"""
    R = ImmutableMatrix(R)
    n = R.rows
    chi = char_poly(R)
    remaining = chi
    conductors = []
    for k in range(1, _MAX_CONDUCTOR + 1):
        if sympy.totient(k) > n:
            continue
        phi_k = cyclotomic(k)
        quotient, remainder = remaining.div(phi_k)
        if not remainder.is_zero:
            continue
        conductors.append(k)
        remaining = quotient
        while True:
            quotient, remainder = remaining.div(phi_k)
            if not remainder.is_zero:
                break
            remaining = quotient

    if remaining.degree() != 0:
        logger.debug(f"Characteristic polynomial {chi.as_expr()} has a non-cyclotomic factor")
        return None

    annihilator = reduce(lambda a, b: a * b, (cyclotomic(k) for k in conductors))
    if not eval_poly_at_matrix(annihilator, R).is_zero_matrix:
        logger.debug("Minimal polynomial is not squarefree")
        return None
    return conductors


def finite_order(R) -> Optional[int]:
    """Order of R as lcm of the conductors in its minimal polynomial, None if infinite"""
    R = ImmutableMatrix(R)
    if not is_unimodular(R):
        raise NotUnimodular("finite_order needs |det R| = 1")

    conductors = minimal_cyclotomic_factors(R)
    if conductors is None:
        return None

    order = reduce(sympy.ilcm, conductors, 1)
    if int_matrix_power(R, order) != ImmutableMatrix.eye(R.rows):
        logger.error(f"R^{order} != I although the minimal polynomial is cyclotomic")
        return None
    return int(order)


def _scaled_integer_rows(M) -> List[List[int]]:
    M = sympy.Matrix(M)
    denominators = [sympy.Rational(entry).q for entry in M]
    scale = reduce(sympy.ilcm, denominators, 1)
    return [[int(sympy.Rational(entry) * scale) for entry in M.row(i)] for i in range(M.rows)]


def integer_kernel(M) -> ImmutableMatrix:
    """Saturated basis (as columns) of {v in Z^n : M v = 0}

    With D = S M T in Smith form, the columns of the unimodular T past the rank span the kernel.
    """
    A = sympy.Matrix(_scaled_integer_rows(M))
    D, _, T = smith_normal_decomp(A, domain=ZZ)
    rank = sum(1 for i in range(min(D.shape)) if D[i, i] != 0)
    if rank == A.cols:
        return ImmutableMatrix.zeros(A.cols, 0)
    return ImmutableMatrix(T[:, rank:])


def is_saturated(basis) -> bool:
    """True when the Smith invariants of the column basis are all 1"""
    basis = sympy.Matrix(basis)
    if basis.cols == 0:
        return True
    return all(abs(f) == 1 for f in invariant_factors(basis, domain=ZZ))


def sylvester_operator(R) -> ImmutableMatrix:
    """Matrix of F -> F - R F' on row-major vec(F)"""
    R = ImmutableMatrix(R)
    n = R.rows
    rows = []
    for i in range(n):
        for j in range(n):
            row = [0] * (n * n)
            row[i * n + j] += 1
            for k in range(n):
                row[j * n + k] -= int(R[i, k])
            rows.append(row)
    return ImmutableMatrix(rows)


def solve_sylvester_integer(R, sample_count: int = 32) -> SylvesterResult:
    """Z-basis of {F integer : F = R F'} with the generic or sampled determinant"""
    R = as_int_matrix(R)
    if not is_unimodular(R):
        raise NotUnimodular("solve_sylvester_integer needs |det R| = 1")

    n = R.rows
    kernel = integer_kernel(sylvester_operator(R))
    basis = [
        ImmutableMatrix(n, n, list(kernel.col(c))) for c in range(kernel.cols)
    ]
    result = SylvesterResult(R=R, basis=basis)
    if not basis:
        return result

    if n <= 4:
        coords = sympy.symbols(f"a0:{len(basis)}")
        generic = sum((c * B for c, B in zip(coords, basis)), sympy.zeros(n, n))
        result.coordinates = list(coords)
        result.generic_det = sympy.factor(sympy.expand(sympy.Matrix(generic).det(method="berkowitz")))

    rng = random.Random(0)
    samples = [tuple(int(i == j) for j in range(len(basis))) for i in range(len(basis))]
    while len(samples) < sample_count:
        samples.append(tuple(rng.randint(-2, 2) for _ in basis))
    result.sampled_dets = [det(_combine(basis, c)) for c in samples]
    return result


def _combine(basis: Sequence[ImmutableMatrix], coords: Sequence[int]) -> List[List[int]]:
    n = basis[0].rows
    out = [[0] * n for _ in range(n)]
    for c, B in zip(coords, basis):
        if c:
            for i in range(n):
                for j in range(n):
                    out[i][j] += c * int(B[i, j])
    return out


def unimodular_solutions(R, bound: int = 3, max_enumeration: int = 200000) -> SylvesterResult:
    """Enumerate the Sylvester lattice in the sup-norm box of radius bound"""
    result = solve_sylvester_integer(R)
    r = result.rank
    if r == 0:
        return result

    size = (2 * bound + 1) ** r
    if size > max_enumeration:
        raise SearchBudgetExceeded(
            f"Box of radius {bound} in rank {r} has {size} points (cap {max_enumeration})"
        )

    seen, dets = set(), []
    for coords in itertools.product(range(-bound, bound + 1), repeat=r):
        if not any(coords):
            continue
        rows = _combine(result.basis, coords)
        d = det(rows)
        dets.append(d)
        if abs(d) == 1:
            key = tuple(itertools.chain.from_iterable(rows))
            if key not in seen:
                seen.add(key)
                F = ImmutableMatrix(rows)
                if F * dual_inverse(F) != result.R:
                    logger.error("Unimodular Sylvester solution fails F F^vee = R")
                    continue
                result.unimodular.append(F)

    result.sampled_dets = dets
    result.unimodular.sort(key=lambda F: tuple(F))
    logger.debug(f"{len(result.unimodular)} unimodular solutions within radius {bound}")
    return result


def rank_mod(M, p: int) -> int:
    """Rank of an integer matrix over GF(p)"""
    return DomainMatrix.from_Matrix(sympy.Matrix(M)).convert_to(GF(p)).rank()
