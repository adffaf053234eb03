"""
Tests for the catalog: names, files and lookup
"""

import numpy as np
import pytest
import sympy
from sympy import ImmutableMatrix

from isodual.services import catalog_service
from isodual.services.catalog_service import (
    CatalogService,
    expand_template,
    negate_name,
    parse_name,
    parse_range,
)
from isodual.utils.validators import NotFound, ValidationError


def test_parse_name_splits_blocks():
    tokens = parse_name("I_{1,1}J_2")
    assert [t.key for t in tokens] == ["I_{1,1}", "J_2"]
    assert tokens[0].index == (1, 1)


def test_parse_name_suffixes():
    negated, plain = parse_name("L_4^-G_3")
    assert negated.negated and not plain.negated
    (repeated,) = parse_name("F_2^3")
    assert repeated.power == 3
    (primed,) = parse_name("Z_4''")
    assert primed.primes == 2


@pytest.mark.parametrize("name", ["", "F2", "I_{1,1", "F_2^0"])
def test_parse_name_rejects_garbage(name):
    with pytest.raises(ValidationError):
        parse_name(name)


def test_negate_name_unrolls_powers():
    assert negate_name("I_1F_2^2") == "I_1^-F_2^-F_2^-"
    assert negate_name("G_3^-") == "G_3"


def test_expand_template():
    assert expand_template("I_{p,2-p}F_4") == ["I_{0,2}F_4", "I_{1,1}F_4", "I_{2,0}F_4"]
    assert expand_template("±F_2") == ["F_2", "F_2^-"]


def test_parse_range():
    assert parse_range("1-4,13") == {1, 2, 3, 4, 13}
    assert parse_range("") == set()


def test_build_matrix_is_block_diagonal(catalog, f2):
    assert catalog.build_matrix("I_1F_2") == ImmutableMatrix(sympy.diag(1, f2))
    assert catalog.build_matrix("F_2^-") == -f2
    assert catalog.build_matrix("J_4") == ImmutableMatrix(
        [[0, 0, 1, 0], [0, 0, 0, 1], [-1, 0, 0, 0], [0, -1, 0, 0]]
    )


def test_unknown_type_letter(catalog):
    with pytest.raises(NotFound):
        catalog.build_matrix("F_9")


def test_registered_orders(catalog):
    for name in ["F_2", "F_3", "G_3", "H_3", "G_4", "K_4"]:
        assert catalog.type_from_name(name).order == catalog.types[name]["order"], name


def test_suspect_flags(catalog):
    assert catalog.is_suspect("F_4")
    assert catalog.is_suspect("I_1F_4")
    assert not catalog.is_suspect("F_2")
    assert not catalog.is_suspect("K_6")
    assert list(catalog.suspect_checks("I_1F_4")) == ["real_type"]
    assert list(catalog.suspect_checks("I_1G_6")) == ["torsion"]
    assert all(catalog.suspect_checks("F_4").values())


def test_lookup_kinds(catalog):
    assert catalog.lookup("F_2").kind == "type"
    assert catalog.lookup("A_2").kind == "gram"
    assert catalog.lookup("alpha").kind == "constant"
    assert catalog.lookup("I_1F_2").kind == "sum"
    assert catalog.lookup("I_1F_2").value.order == 6


def test_lookup_unknown(catalog):
    with pytest.raises(NotFound):
        catalog.lookup("nothing here")


def test_names_by_kind(catalog):
    assert "F_2" in catalog.names("type")
    assert "D_4" in catalog.names("gram")
    with pytest.raises(ValidationError):
        catalog.names("bogus")


def test_gram_values_are_unimodular(catalog):
    for name in ["A_2", "Lambda_3", "D_4"]:
        A = catalog.gram_values(name)
        assert np.allclose(A, A.T)
        assert np.linalg.det(A) == pytest.approx(1.0)


def test_witness_gram_is_block_sum(catalog):
    A = catalog.witness_gram("A_2+Lambda_3")
    assert A.shape == (5, 5)
    assert np.allclose(A[:2, :2], catalog.gram_values("A_2"))
    with pytest.raises(ValidationError):
        catalog.witness_gram(" + ")


def test_maximal_counts_have_integer_keys(catalog):
    counts = catalog.maximal_counts()
    assert all(isinstance(n, int) for n in counts)


def test_curated_splits_reproduce_their_targets(catalog):
    for target in catalog.split_targets():
        split = catalog.curated_split(target)
        assert split.residual < 1e-9, target


def test_missing_catalog_directory(tmp_path):
    with pytest.raises(NotFound):
        CatalogService({"DATA_DIR": str(tmp_path)})


def test_invalid_catalog_json(tmp_path):
    (tmp_path / "types.json").write_text("{", encoding="utf-8")
    with pytest.raises(ValidationError):
        CatalogService({"DATA_DIR": str(tmp_path)})


def test_catalog_schema_violation(tmp_path):
    (tmp_path / "types.json").write_text('{"schema": 1, "kind": "types"}', encoding="utf-8")
    with pytest.raises(ValidationError):
        CatalogService({"DATA_DIR": str(tmp_path)})


def test_torsion_matrix_needs_known_name():
    with pytest.raises(NotFound):
        catalog_service.torsion_matrix("Q", (3,))
