"""
Algebraic isodual types: predicate, composition, equivalence action and canonical decomposition
"""

import logging
from typing import List, Optional, Sequence, Tuple

import sympy
from sympy import ImmutableMatrix, kronecker_product

from ..models import AlgType, Component, Decomposition
from ..utils.validators import (
    InputValidator,
    IsodualError,
    NotIsodual,
    NotUnimodular,
    ValidationError,
)
from . import exact_service as exact

logger = logging.getLogger(__name__)

INVARIANTS_EQUIVALENT = "equivalent-by-invariants"
INVARIANTS_DISTINGUISHED = "distinguished"
INVARIANTS_UNKNOWN = "unknown"


def is_isodual(F) -> bool:
    """True iff |det F| = 1 and F F^vee has finite order"""
    F = exact.as_int_matrix(F)
    InputValidator.validate_square(F.tolist())
    if not exact.is_unimodular(F):
        return False
    return exact.finite_order(F * exact.dual_inverse(F)) is not None


def make_type(F, name: Optional[str] = None) -> AlgType:
    F = exact.as_int_matrix(F)
    InputValidator.validate_square(F.tolist())
    if not exact.is_unimodular(F):
        raise NotIsodual(f"{name or 'matrix'} is not unimodular (det {exact.det(F)})")

    R = ImmutableMatrix(F * exact.dual_inverse(F))
    order = exact.finite_order(R)
    if order is None:
        raise NotIsodual(f"{name or 'matrix'}: F F^vee has infinite order")
    return AlgType(F=F, R=R, order=order, name=name)


def _joined_name(a: AlgType, b: AlgType) -> Optional[str]:
    if a.name and b.name:
        return f"{a.name}{b.name}"
    return None


def direct_sum(a: AlgType, b: AlgType) -> AlgType:
    """Block-diagonal sum; order is the lcm of the orders"""
    return AlgType(
        F=ImmutableMatrix(sympy.diag(a.F, b.F)),
        R=ImmutableMatrix(sympy.diag(a.R, b.R)),
        order=int(sympy.ilcm(a.order, b.order)),
        name=_joined_name(a, b),
    )


def direct_sum_all(types: Sequence[AlgType]) -> AlgType:
    if not types:
        raise ValidationError("Empty direct sum")
    result = types[0]
    for t in types[1:]:
        result = direct_sum(result, t)
    return result


def tensor(a: AlgType, b: AlgType) -> AlgType:
    """Kronecker product of types; (A (x) B)^vee = A^vee (x) B^vee"""
    F = ImmutableMatrix(kronecker_product(a.F, b.F))
    R = ImmutableMatrix(kronecker_product(a.R, b.R))
    order = exact.finite_order(R)
    if order is None:
        raise NotIsodual("Tensor product has infinite order")
    name = f"{a.name}(x){b.name}" if a.name and b.name else None
    return AlgType(F=F, R=R, order=order, name=name)


def equiv_act(T, a: AlgType) -> AlgType:
    """The type of T F T'; R is conjugated to T R T^-1"""
    T = exact.as_int_matrix(T)
    if T.rows != a.n:
        raise ValidationError(f"T has size {T.rows}, type has rank {a.n}")
    d = exact.det(T)
    if d not in (1, -1):
        raise NotUnimodular(f"det T = {d}")
    T_inv = ImmutableMatrix(T.adjugate(method="bareiss") * d)
    return AlgType(
        F=ImmutableMatrix(T * a.F * T.T),
        R=ImmutableMatrix(T * a.R * T_inv),
        order=a.order,
    )


def canonical_decomposition(a: AlgType) -> Decomposition:
    """Components M_k = ker Phi_k(R^vee) for k | order, with F restricted to each"""
    R_dual = exact.dual_inverse(a.R)
    components: List[Component] = []
    for k in sympy.divisors(a.order):
        kernel = exact.integer_kernel(exact.eval_poly_at_matrix(exact.cyclotomic(k), R_dual))
        if kernel.cols == 0:
            continue
        block = ImmutableMatrix(kernel.T * a.F * kernel)
        components.append(Component(k=k, basis=kernel, block=block))

    rank = sum(c.basis.cols for c in components)
    if rank != a.n:
        raise ArithmeticError(f"Components have total rank {rank}, expected {a.n}")

    for i, first in enumerate(components):
        for second in components[i + 1:]:
            cross = first.basis.T * a.F * second.basis
            back = second.basis.T * a.F * first.basis
            if not (cross.is_zero_matrix and back.is_zero_matrix):
                logger.error(f"Components {first.k} and {second.k} are not F-orthogonal")
                raise ArithmeticError("Canonical components are not bilaterally orthogonal")

    stacked = ImmutableMatrix.hstack(*[c.basis for c in components])
    index = abs(exact.det(stacked))
    return Decomposition(components=tuple(components), index=index)


def transform_family(a: AlgType) -> List[AlgType]:
    """The orbit {F, F', -F, -F'} deduplicated by exact equality"""
    suffixes = ["", "'", "^-", "'^-"]
    candidates = [a.F, a.F.T, -a.F, -a.F.T]
    seen, family = set(), []
    for suffix, F in zip(suffixes, candidates):
        key = tuple(F)
        if key in seen:
            continue
        seen.add(key)
        family.append(make_type(F, f"{a.name}{suffix}" if a.name else None))
    return family


def odd_power_type(a: AlgType, ell: int) -> AlgType:
    """G = F (F^vee F)^ell, with G G^vee = R^(2 ell + 1)"""
    if ell < 0:
        raise ValidationError("ell must be nonnegative")
    F_dual = exact.dual_inverse(a.F)
    G = ImmutableMatrix(a.F * exact.int_matrix_power(F_dual * a.F, ell))
    result = make_type(G)
    expected = exact.int_matrix_power(a.R, 2 * ell + 1)
    if result.R != expected:
        raise ArithmeticError(f"G G^vee != R^{2 * ell + 1}")
    return result


def symmetric_parity(a: AlgType, decomposition: Optional[Decomposition] = None) -> Optional[str]:
    decomposition = decomposition or canonical_decomposition(a)
    component = decomposition.component(1)
    if component is None:
        return None
    block = component.block
    return "even" if all(block[i, i] % 2 == 0 for i in range(block.rows)) else "odd"


def type_equal_invariants(a: AlgType, b: AlgType) -> str:
    """Compare order, chi(R), signature, decomposition index and parity"""
    from .realtype_service import signature

    if a.n != b.n or a.order != b.order:
        return INVARIANTS_DISTINGUISHED
    if exact.char_poly(a.R) != exact.char_poly(b.R):
        return INVARIANTS_DISTINGUISHED

    decomposition_a = canonical_decomposition(a)
    decomposition_b = canonical_decomposition(b)
    if decomposition_a.index != decomposition_b.index:
        return INVARIANTS_DISTINGUISHED
    if symmetric_parity(a, decomposition_a) != symmetric_parity(b, decomposition_b):
        return INVARIANTS_DISTINGUISHED

    try:
        same_signature = signature(a) == signature(b)
    except IsodualError as e:
        logger.warning(f"Signature unavailable, comparison undecided: {e}")
        return INVARIANTS_UNKNOWN
    if not same_signature:
        return INVARIANTS_DISTINGUISHED
    return INVARIANTS_EQUIVALENT


def _is_block_diagonal(M, sizes: Tuple[int, int]) -> bool:
    n1 = sizes[0]
    return M[:n1, n1:].is_zero_matrix and M[n1:, :n1].is_zero_matrix


def splitting_holds(a: AlgType, sizes: Tuple[int, int]) -> bool:
    """Every integer F with F F^vee = R_1 + R_2 is block-diagonal when chi(R_1), chi(R_2) are coprime"""
    n1, n2 = sizes
    if n1 + n2 != a.n or n1 < 1 or n2 < 1:
        raise ValidationError(f"Block sizes {sizes} do not add up to {a.n}")
    if not _is_block_diagonal(a.R, sizes):
        raise ValidationError("R is not block-diagonal for these sizes")

    chi_1 = exact.char_poly(a.R[:n1, :n1])
    chi_2 = exact.char_poly(a.R[n1:, n1:])
    if sympy.gcd(chi_1, chi_2).degree() > 0:
        raise ValidationError("Characteristic polynomials of the blocks are not coprime")

    solutions = exact.solve_sylvester_integer(a.R)
    return _is_block_diagonal(a.F, sizes) and all(
        _is_block_diagonal(B, sizes) for B in solutions.basis
    )


def witness_holds(T, source, target) -> bool:
    """T source T' == target, exactly"""
    T, source, target = (ImmutableMatrix(M) for M in (T, source, target))
    return ImmutableMatrix(T * source * T.T) == target


def invariant_key(a: AlgType) -> tuple:
    """Invariants shared by F, F' and -F: rank, order, chi(R), index, parity, signature up to sign"""
    from .realtype_service import signature

    decomposition = canonical_decomposition(a)
    return (
        a.n,
        a.order,
        tuple(exact.poly_coeffs(exact.char_poly(a.R))),
        decomposition.index,
        symmetric_parity(a, decomposition),
        signature(a).normalized().sort_key(),
    )
