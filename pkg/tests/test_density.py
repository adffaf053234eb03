"""
Tests for minima, Hermite invariants, certificates and constants
"""

import numpy as np
import pytest

from isodual.services import density_service as density
from isodual.services import geometry_service as geometry
from isodual.services import type_service as types
from isodual.utils import expressions
from isodual.utils.validators import (
    NumericalInstability,
    SearchBudgetExceeded,
    UnknownConstant,
    ValidationError,
)


def test_shortest_vectors_of_identity():
    result = density.shortest_vectors(np.eye(3))
    assert result.min == pytest.approx(1.0)
    assert result.vectors == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]


def test_hexagonal_minimum(hexagonal):
    result = density.shortest_vectors(hexagonal)
    assert result.min == pytest.approx(2 / np.sqrt(3))
    assert result.pairs == 3
    assert density.hermite(hexagonal) == pytest.approx(2 / np.sqrt(3))


def test_enumeration_agrees_with_brute_force():
    A = np.array([[2.0, 1.0, 0.0], [1.0, 3.0, 1.0], [0.0, 1.0, 4.0]])
    fast = density.shortest_vectors(A)
    slow = density.brute_force_min(A, bound=3)
    assert fast.min == pytest.approx(slow.min)
    assert fast.vectors == slow.vectors


def test_hermite_is_scale_invariant(hexagonal):
    assert density.hermite(5.0 * hexagonal) == pytest.approx(density.hermite(hexagonal))


def test_rejects_bad_gram_matrices():
    with pytest.raises(ValidationError):
        density.shortest_vectors(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(NumericalInstability):
        density.shortest_vectors(np.array([[1.0, 0.0], [0.0, -1.0]]))


def test_enumeration_budget():
    with pytest.raises(SearchBudgetExceeded):
        density.vectors_up_to(np.eye(3), 10.0, max_vectors=5)


def test_eutaxy_zero_sum_form():
    assert density.is_eutactic(np.array([[1.0, -1.0]]))
    assert not density.is_eutactic(np.array([[1.0, 2.0]]))
    assert not density.is_eutactic(np.zeros((2, 0)))


def test_eutaxy_with_target():
    G = np.eye(2)
    assert density.is_eutactic(G, [1.0, 1.0])
    assert not density.is_eutactic(G, [-1.0, 0.0])


def test_point_certificate(catalog):
    certificate = density.certify_local_max(catalog.geotype_for("F_2"))
    assert certificate.dimension == 0
    assert certificate.is_local_max


def test_hexagonal_point_is_local_max_on_v_j2(j2, hexagonal):
    gt = geometry.make_geotype(types.make_type(j2))
    certificate = density.certify_local_max(gt, hexagonal)
    assert certificate.pairs == 3
    assert certificate.rank == 2
    assert certificate.is_local_max


def test_identity_is_not_perfect_on_v_j2(j2):
    gt = geometry.make_geotype(types.make_type(j2))
    certificate = density.certify_local_max(gt, np.eye(2))
    assert certificate.rank == 1
    assert not certificate.perfect_rel


@pytest.mark.parametrize("name", ["alpha", "sqrt2", "two_over_sqrt3", "four_thirds"])
def test_constants_match_their_witnesses(catalog, name):
    report = density.verify_constant(name, catalog.gram_values)
    assert report.status == "PASS", report.render()


def test_constant_without_witness_is_skipped(catalog):
    report = density.verify_constant("epsilon", catalog.gram_values)
    assert report.status == "SKIPPED"
    assert report.computed is None


def test_unknown_constant(catalog):
    with pytest.raises(UnknownConstant):
        density.verify_constant("kappa", catalog.gram_values)


def test_ascent_reaches_the_hexagonal_form(j2):
    start = geometry.siegel_embed(0.3 + 1.1j)
    top = density.ascend_local_max(start, j2)
    assert geometry.membership(top, j2)
    result = density.shortest_vectors(top)
    assert result.min == pytest.approx(2 / np.sqrt(3), abs=1e-9)
    assert result.pairs == 3


def test_ascent_stays_put_on_a_point(catalog, hexagonal):
    F = catalog.geotype_for("F_2").F
    assert np.allclose(density.ascend_local_max(hexagonal, F), hexagonal)


def test_phi_witness_is_a_local_max(catalog):
    A = catalog.gram_values("KG_phi")
    result = density.shortest_vectors(A)
    assert result.min == pytest.approx(1 + (np.sqrt(6) - np.sqrt(2)) / 2, abs=1e-9)
    assert result.pairs == 10
    assert density.verify_constant("phi", catalog.gram_values).status == "PASS"
    certificate = density.certify_local_max(catalog.geotype_for("K_4G_3"), A)
    assert certificate.is_local_max


def test_constant_tolerance_rejects_small_errors(catalog, monkeypatch):
    shifted = density.ConstantSpec("2/sqrt(3) + 1/200000000", "A_2", pairs=3)
    monkeypatch.setitem(density.CONSTANTS, "shifted", shifted)
    report = density.verify_constant("shifted", catalog.gram_values)
    assert report.status == "FAIL"
    assert abs(report.computed - report.expected) == pytest.approx(5e-9, rel=1e-3)


def test_nu_shares_the_rank_five_witness(catalog):
    report = density.verify_constant("nu", catalog.gram_values)
    assert report.status == "PASS", report.render()
    assert report.witness == "Lambda5p"
    assert report.reason
    assert expressions.same_number("nu", "1/gam")
    assert not expressions.same_number("nu", "phi")


@pytest.mark.parametrize("name", ["epsilon", "zeta", "eta", "three_halves"])
def test_constants_without_forms_say_why(catalog, name):
    report = density.verify_constant(name, catalog.gram_values)
    assert report.status == "SKIPPED"
    assert report.reason == density.CONSTANTS[name].reason
