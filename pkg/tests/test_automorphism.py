"""
Tests for automorphism groups and inclusions
"""

import pytest
import sympy
from sympy import ImmutableMatrix

from isodual.services import automorphism_service as automorphisms
from isodual.services import geometry_service as geometry
from isodual.services import type_service as types
from isodual.utils.validators import RankMismatch


@pytest.fixture
def i11():
    return geometry.make_geotype(types.make_type(ImmutableMatrix(sympy.diag(1, -1))))


def test_group_orders_of_rank_two(catalog):
    for row in catalog.geometric_table("8")["rows"]:
        if row["n"] != 2:
            continue
        group = automorphisms.automorphism_group(catalog.geotype_for(row["name"]))
        assert len(group) == row["gamma"], row["name"]


def test_group_contains_minus_identity(catalog):
    group = automorphisms.automorphism_group(catalog.geotype_for("F_2"))
    assert ImmutableMatrix(-sympy.eye(2)) in group
    assert ImmutableMatrix(sympy.eye(2)) in group


def test_i11_is_included_in_j2(i11, j2):
    assert automorphisms.includes(i11, types.make_type(j2))


def test_i11_is_not_included_in_u2(i11):
    u2 = types.make_type(ImmutableMatrix([[0, 1], [1, 0]]))
    assert not automorphisms.includes(i11, u2)


def test_includes_itself(i11):
    assert automorphisms.includes(i11, i11.alg)


def test_includes_needs_equal_rank(i11, f2):
    with pytest.raises(RankMismatch):
        automorphisms.includes(i11, types.make_type(ImmutableMatrix(sympy.diag(1, f2))))


def test_j2_is_maximal_by_group(j2):
    gt = geometry.make_geotype(types.make_type(j2))
    assert automorphisms.is_maximal_by_group(gt) is True


def test_undecided_maximality(catalog):
    assert automorphisms.is_maximal_by_group(catalog.geotype_for("F_2")) is None


def test_fixes_pointwise(j2):
    gt = geometry.make_geotype(types.make_type(j2))
    assert automorphisms.fixes_pointwise(sympy.eye(2), gt)
    assert automorphisms.fixes_pointwise(-sympy.eye(2), gt)
    assert not automorphisms.fixes_pointwise([[0, 1], [-1, 0]], gt)


def test_inclusion_up_to_equivalence(catalog):
    L4 = catalog.geotype_for("L_4")
    J4 = catalog.type_from_name("J_4")
    assert automorphisms.includes(L4, J4)
    group = automorphisms.automorphism_group(L4)
    assert len(group) == 1152
    assert automorphisms.includes(L4, J4, group=group)


def test_indefinite_identity_is_not_in_i1_j2(catalog):
    gt = geometry.make_geotype(types.make_type(ImmutableMatrix(sympy.diag(1, 1, -1))))
    assert not automorphisms.includes(gt, catalog.type_from_name("I_1J_2"))
