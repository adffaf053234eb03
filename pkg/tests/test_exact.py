"""
Tests for exact integer arithmetic
"""

import pytest
import sympy
from sympy import ImmutableMatrix

from isodual.services import exact_service as exact
from isodual.utils.validators import NotUnimodular, ValidationError


def test_dual_inverse_of_j2_is_itself(j2):
    assert exact.dual_inverse(j2) == j2
    assert j2 * exact.dual_inverse(j2) == -sympy.eye(2)


def test_dual_inverse_rejects_non_unimodular():
    with pytest.raises(NotUnimodular):
        exact.dual_inverse(ImmutableMatrix([[2, 0], [0, 1]]))


def test_as_int_matrix_rejects_fractions():
    with pytest.raises(ValidationError):
        exact.as_int_matrix([[sympy.Rational(1, 2), 0], [0, 1]])


def test_det_of_nested_lists():
    rows = [[2, -1, 0, 3], [1, 1, 4, -2], [0, 5, 1, 1], [-3, 2, 2, 0]]
    assert exact.det(rows) == sympy.Matrix(rows).det()
    assert exact.det(ImmutableMatrix(rows)) == exact.det(rows)
    assert exact.det([]) == 1


def test_char_poly_of_f2_is_sixth_cyclotomic(f2):
    R = f2 * exact.dual_inverse(f2)
    assert exact.char_poly(R) == exact.cyclotomic(6)
    assert exact.poly_coeffs(exact.cyclotomic(6)) == [1, -1, 1]


@pytest.mark.parametrize("k, degree", [(1, 1), (2, 1), (3, 2), (4, 2), (5, 4), (8, 4), (12, 4)])
def test_cyclotomic_degree_is_totient(k, degree):
    assert exact.cyclotomic(k).degree() == degree


def test_cyclotomic_needs_positive_conductor():
    with pytest.raises(ValidationError):
        exact.cyclotomic(0)


def test_finite_order():
    assert exact.finite_order(ImmutableMatrix([[0, -1], [1, 1]])) == 6
    assert exact.finite_order(ImmutableMatrix([[0, 1], [-1, 0]])) == 4
    assert exact.finite_order(sympy.eye(3)) == 1


def test_finite_order_none_for_unipotent():
    assert exact.finite_order(ImmutableMatrix([[1, 1], [0, 1]])) is None
    assert exact.finite_order(ImmutableMatrix([[-3, 2], [-2, 1]])) is None


def test_finite_order_needs_unit_determinant():
    with pytest.raises(NotUnimodular):
        exact.finite_order(ImmutableMatrix([[2, 0], [0, 1]]))


def test_int_matrix_power_negative():
    M = ImmutableMatrix([[1, 1], [0, 1]])
    assert exact.int_matrix_power(M, -2) == ImmutableMatrix([[1, -2], [0, 1]])


def test_rank_mod_two():
    assert exact.rank_mod(ImmutableMatrix([[1, 1], [1, 1]]), 2) == 1
    assert exact.rank_mod(ImmutableMatrix([[2, 0], [0, 2]]), 2) == 0
    assert exact.rank_mod(ImmutableMatrix([[1, 1], [1, -1]]), 2) == 1
    assert exact.rank_mod(ImmutableMatrix([[1, 1], [1, -1]]), 3) == 2


@pytest.mark.parametrize(
    "R, divisor",
    [
        (ImmutableMatrix([[0, 1], [-1, 0]]), 2),
        (ImmutableMatrix([[0, -1], [1, -1]]), 3),
    ],
)
def test_no_unimodular_solution_within_bound(R, divisor):
    result = exact.unimodular_solutions(R, bound=3)
    assert result.rank == 1
    assert result.unimodular == []
    assert all(d % divisor == 0 for d in result.sampled_dets)


def test_x4_has_no_unimodular_solution_within_bound():
    R = ImmutableMatrix([[0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]])
    result = exact.unimodular_solutions(R, bound=3)
    assert result.unimodular == []
    assert result.det_gcd % 2 == 0


def test_sylvester_solutions_satisfy_the_equation(f2):
    R = f2 * exact.dual_inverse(f2)
    result = exact.solve_sylvester_integer(R)
    assert result.rank >= 1
    for B in result.basis:
        assert B == R * B.T


def test_is_unimodular(f2):
    assert exact.is_unimodular(f2)
    assert not exact.is_unimodular(ImmutableMatrix([[2, 1], [1, 1]]) * 2)


@pytest.mark.parametrize(
    "R, conductors",
    [
        (ImmutableMatrix([[0, 1], [-1, 1]]), [6]),
        (-sympy.eye(2), [2]),
        (ImmutableMatrix(sympy.diag(1, -1)), [1, 2]),
        (ImmutableMatrix([[1, 1], [0, 1]]), None),
    ],
)
def test_minimal_cyclotomic_factors(R, conductors):
    assert exact.minimal_cyclotomic_factors(R) == conductors


def test_integer_kernel_is_saturated():
    M = ImmutableMatrix([[1, 2]])
    K = exact.integer_kernel(M)
    assert K.cols == 1
    assert (M * K).is_zero_matrix
    assert sorted(abs(x) for x in K) == [1, 2]

    M = ImmutableMatrix([[1, 1, 1]])
    K = exact.integer_kernel(M)
    assert K.cols == 2
    assert (M * K).is_zero_matrix
