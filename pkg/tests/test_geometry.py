"""
Tests for Gram varieties: membership, embeddings, tangent spaces and gradients
"""

import numpy as np
import pytest
import sympy
from sympy import ImmutableMatrix

from isodual.services import geometry_service as geometry
from isodual.services import type_service as types
from isodual.utils.validators import (
    NotInHalfPlane,
    NotInSiegelSpace,
    NotMember,
    OutsideBall,
    ValidationError,
)


@pytest.fixture
def i21():
    return ImmutableMatrix(sympy.diag(1, 1, -1))


def test_identity_is_member_of_identity_type():
    assert geometry.membership(np.eye(3), sympy.eye(3))


def test_membership_rejects_scaled_point(j2):
    assert geometry.membership(np.eye(2), j2)
    assert not geometry.membership(2 * np.eye(2), j2)
    with pytest.raises(NotMember):
        geometry.require_member(2 * np.eye(2), j2)


def test_membership_rejects_wrong_shape(j2):
    assert not geometry.membership(np.eye(3), j2)


@pytest.mark.parametrize("z", [1j, 0.3 + 1.7j, -2.0 + 0.4j])
def test_siegel_embedding_lands_in_v_j2(j2, z):
    assert geometry.membership(geometry.siegel_embed(z), j2)


def test_siegel_embedding_rejects_lower_half_plane():
    with pytest.raises(NotInSiegelSpace):
        geometry.siegel_embed(1 - 1j)


def test_klein_embedding_lands_in_v_ipq(i21):
    A = geometry.klein_embed(2, 1, [[0.3], [-0.5]])
    assert geometry.membership(A, i21)


def test_klein_embedding_rejects_points_outside_ball():
    with pytest.raises(OutsideBall):
        geometry.klein_embed(2, 1, [[0.8], [0.8]])


def test_v21_half_plane_model(i21):
    assert np.allclose(geometry.v21_halfplane(1j), np.eye(3))
    A = geometry.v21_halfplane(2j)
    assert np.allclose(A[1:, 1:], [[17 / 8, 15 / 8], [15 / 8, 17 / 8]])
    assert geometry.membership(geometry.v21_halfplane(0.4 + 0.9j), i21)


def test_half_plane_models_reject_lower_half_plane():
    with pytest.raises(NotInHalfPlane):
        geometry.w11_halfplane(-1j)
    with pytest.raises(NotInHalfPlane):
        geometry.cayley(0.5)


def test_w11_half_plane_basepoint():
    assert np.allclose(geometry.w11_halfplane(1j), np.eye(4))


def test_v22ii_lands_in_v_u4(catalog):
    U4 = catalog.build_matrix("U_4")
    assert np.allclose(geometry.v22II_embed(1j, 1j), np.eye(4))
    assert geometry.membership(geometry.v22II_embed(1j, 0.7 + 1.3j), U4)


def test_f6_point_is_member(catalog):
    assert geometry.membership(geometry.f6_point(0.5 + 2j), catalog.build_matrix("F_6"))


def test_geotype_basepoint_is_member(catalog):
    for name in ["F_2", "G_3", "I_1F_2", "K_4"]:
        gt = catalog.geotype_for(name)
        assert geometry.membership(gt.basepoint, gt.F), name


def test_param_point_moves_inside_variety(i21):
    gt = geometry.make_geotype(types.make_type(i21))
    assert np.allclose(geometry.param_point(gt), gt.basepoint)
    A = geometry.param_point(gt, [[[0.2], [0.1]]])
    assert geometry.membership(A, i21)


@pytest.mark.parametrize(
    "F, dim",
    [
        (ImmutableMatrix(sympy.diag(1, 1, -1)), 2),
        (ImmutableMatrix([[0, 1], [-1, 0]]), 2),
        (ImmutableMatrix([[0, 1], [1, 0]]), 1),
        (ImmutableMatrix([[1, -1], [0, 1]]), 0),
    ],
)
def test_tangent_dimension_matches_signature(F, dim):
    gt = geometry.make_geotype(types.make_type(F))
    frame = geometry.tangent_frame(gt.basepoint, F)
    assert frame.dimension == dim == gt.dimension


def test_geodesic_and_symmetry_stay_in_variety(i21):
    A = np.eye(3)
    frame = geometry.tangent_frame(A, i21)
    X = frame.basis[0]
    B = geometry.geodesic(A, X, 0.7)
    assert geometry.membership(B, i21)
    C = geometry.klein_embed(2, 1, [[0.1], [0.4]])
    assert geometry.membership(geometry.symmetry(C, B), i21)


def test_length_gradient_vanishes_on_points(f2):
    gt = geometry.make_geotype(types.make_type(f2))
    gradient = geometry.length_gradient(gt.basepoint, f2, [1, 0])
    assert np.allclose(gradient, 0.0)


def test_length_gradient_is_tangent_and_represents_length(j2):
    A = geometry.siegel_embed(0.3 + 1.2j)
    u = [1, 2]
    frame = geometry.tangent_frame(A, j2)
    gradient = geometry.length_gradient(A, j2, u, frame)
    coords = geometry.sym_coords(gradient)
    assert np.allclose(frame.operator @ coords, -coords, atol=1e-8)
    for X in frame.basis:
        expected = float(np.dot(u, X @ np.array(u, dtype=float)))
        assert geometry.inner(A, gradient, X) == pytest.approx(expected, abs=1e-8)


@pytest.mark.parametrize(
    "F, A",
    [
        (ImmutableMatrix([[0, 1], [-1, 0]]), geometry.siegel_embed(-0.4 + 0.8j)),
        (ImmutableMatrix(sympy.diag(1, 1, -1)), geometry.klein_embed(2, 1, [[0.2], [-0.3]])),
        (ImmutableMatrix(sympy.diag(1, -1, -1)), geometry.klein_embed(1, 2, [[0.1, 0.4]])),
    ],
)
def test_length_gradient_matches_finite_differences(F, A):
    rng = np.random.default_rng(7)
    frame = geometry.tangent_frame(A, F)
    h = 1e-5
    for _ in range(5):
        u = rng.integers(-2, 3, size=A.shape[0])
        if not np.any(u):
            u[0] = 1
        gradient = geometry.length_gradient(A, F, u, frame)
        X = sum(c * B for c, B in zip(rng.normal(size=frame.dimension), frame.basis))
        forward = geometry.geodesic(A, X, h)
        backward = geometry.geodesic(A, X, -h)
        numeric = (u @ forward @ u - u @ backward @ u) / (2 * h)
        analytic = geometry.inner(A, gradient, X)
        assert analytic == pytest.approx(numeric, rel=1e-5, abs=1e-7)


def test_disc_models(i21):
    assert np.allclose(geometry.v21_disc(0), np.eye(3))
    assert geometry.membership(geometry.v21_disc(0.3 + 0.4j), i21)
    assert np.allclose(geometry.w11_disc(0), np.eye(4))
    z = 0.7 + 1.9j
    assert np.allclose(geometry.w11_halfplane(z), geometry.w11_disc(geometry.cayley(z)))


def test_hermitian_points_at_the_origin():
    assert np.allclose(geometry.hermitian_w21(0, 0), np.eye(3))
    assert np.allclose(geometry.hermitian_embed(2, 1, [[0], [0]]), np.eye(6))
    assert np.allclose(geometry.kg_point(0, 0, np.eye(7)), np.eye(7))
    assert np.allclose(geometry.i1f4_point(1j, 1j), np.eye(5))
    with pytest.raises(OutsideBall):
        geometry.hermitian_w21(0.8, 0.8)


def test_symplectic_action_on_half_plane():
    assert geometry.symplectic_act([[1, 1], [0, 1]], 0.5 + 1j)[0, 0] == pytest.approx(1.5 + 1j)
    assert geometry.symplectic_act([[0, -1], [1, 0]], 1j)[0, 0] == pytest.approx(1j)
    with pytest.raises(ValidationError):
        geometry.symplectic_act(np.eye(3), 1j)
