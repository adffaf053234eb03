"""
Tests for algebraic isodual types
"""

import pytest
import sympy
from sympy import ImmutableMatrix

from isodual.services import type_service as types
from isodual.utils.validators import NotIsodual, ValidationError


def test_make_type_f2(f2):
    a = types.make_type(f2, "F_2")
    assert a.order == 6
    assert not a.principal
    assert a.R == ImmutableMatrix([[0, -1], [1, 1]])


def test_j2_has_order_two(j2):
    a = types.make_type(j2)
    assert a.R == -sympy.eye(2)
    assert a.order == 2
    assert a.principal


def test_not_isodual(not_isodual):
    assert not types.is_isodual(not_isodual)
    with pytest.raises(NotIsodual):
        types.make_type(not_isodual)


def test_non_unimodular_is_not_isodual():
    with pytest.raises(NotIsodual):
        types.make_type(ImmutableMatrix([[2, 0], [0, 1]]))


def test_direct_sum_takes_lcm(f2, j2):
    a = types.direct_sum(types.make_type(f2), types.make_type(j2))
    assert a.n == 4
    assert a.order == 6
    assert a.F[:2, 2:].is_zero_matrix


def test_tensor_multiplies_r(f2, j2):
    a, b = types.make_type(f2), types.make_type(j2)
    product = types.tensor(a, b)
    assert product.n == 4
    assert product.F[:2, 2:] == f2[0, 1] * j2
    assert product.R[2:, 2:] == a.R[1, 1] * b.R
    assert product.order == 3


def test_equiv_act_keeps_invariants(f2):
    a = types.make_type(f2)
    T = ImmutableMatrix([[1, 1], [0, 1]])
    b = types.equiv_act(T, a)
    assert b.order == a.order
    assert b.R.charpoly() == a.R.charpoly()
    assert types.make_type(b.F).R == b.R


def test_equiv_act_rejects_wrong_size(f2):
    with pytest.raises(ValidationError):
        types.equiv_act(sympy.eye(3), types.make_type(f2))


def test_canonical_decomposition_of_i1_f2(f2):
    a = types.make_type(ImmutableMatrix(sympy.diag(1, f2)))
    decomposition = types.canonical_decomposition(a)
    assert [c.k for c in decomposition.components] == [1, 6]
    assert [c.basis.cols for c in decomposition.components] == [1, 2]
    assert decomposition.index == 1


def test_transform_family_sizes(f2):
    assert len(types.transform_family(types.make_type(f2, "F_2"))) == 4
    assert len(types.transform_family(types.make_type(sympy.eye(2)))) == 2


def test_odd_power_type_cubes_r(f2):
    b = types.odd_power_type(types.make_type(f2), 1)
    assert b.R == -sympy.eye(2)
    assert b.order == 2


def test_symmetric_parity():
    assert types.symmetric_parity(types.make_type(sympy.diag(1, -1))) == "odd"
    assert types.symmetric_parity(types.make_type(ImmutableMatrix([[0, 1], [1, 0]]))) == "even"
    assert types.symmetric_parity(types.make_type(ImmutableMatrix([[0, 1], [-1, 0]]))) is None


def test_splitting_holds_for_coprime_blocks(f2):
    a = types.make_type(ImmutableMatrix(sympy.diag(1, f2)))
    assert types.splitting_holds(a, (1, 2))


def test_splitting_needs_coprime_blocks():
    a = types.make_type(sympy.eye(3))
    with pytest.raises(ValidationError):
        types.splitting_holds(a, (1, 2))


def test_invariant_key_ignores_sign_and_transpose(f2):
    key = types.invariant_key(types.make_type(f2))
    assert types.invariant_key(types.make_type(f2.T)) == key
    assert types.invariant_key(types.make_type(-f2)) == key


def test_invariants_separate_i11_and_u2():
    i11 = types.make_type(sympy.diag(1, -1))
    u2 = types.make_type(ImmutableMatrix([[0, 1], [1, 0]]))
    assert types.type_equal_invariants(i11, u2) == types.INVARIANTS_DISTINGUISHED


def test_rank_seven_identity(catalog):
    left = catalog.type_from_name("I_3F_4")
    right = catalog.type_from_name("I_1^-F_6")
    assert types.type_equal_invariants(left, right) == types.INVARIANTS_EQUIVALENT


def test_relation_witness(catalog):
    P = ImmutableMatrix([[1, 2, -1, 1], [1, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
    source = catalog.build_matrix("I_1^-G_3")
    target = catalog.build_matrix("I_1H_3^-")
    assert types.witness_holds(P, source, target)
    assert not types.witness_holds(sympy.eye(4), source, target)
