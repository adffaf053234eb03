"""
Tests for table verification and the torsion census
"""

import numpy as np
import pytest

from isodual.services import verification_service as verification
from isodual.utils.validators import NotFound


def test_row_status_precedence():
    assert verification.row_status({"a": "PASS", "b": "FAIL: x"}) == "FAIL"
    assert verification.row_status({"a": "PASS", "b": "UNSEPARATED: A~B"}) == "UNSEPARATED"
    assert verification.row_status({"a": "PASS", "b": "SKIPPED: budget"}) == "PASS"
    assert verification.row_status({"a": "SKIPPED: budget"}) == "SKIPPED"


def test_compare():
    assert verification.compare("order", 6, 6) == "PASS: order 6"
    assert verification.compare("order", 4, 6) == "FAIL: order 4, expected 6"


def test_family_candidates():
    assert verification.family_candidates(2, [], {}) == ["I_2^-", "I_{1,1}", "I_2", "R_2"]
    names = verification.family_candidates(3, ["J_2"], {"J_2": 2})
    assert len(names) == 8
    assert "I_1J_2" in names and "I_1^-R_2" in names


def test_suspect_flag_covers_only_its_checks(verifier):
    checks = {"real_type": "FAIL: mismatch", "order": "FAIL: order 4, expected 2"}
    row = verifier._row("3/1", "F_4", checks, {"real_type": "tables disagree"})
    assert row.checks["real_type"] == "SKIPPED: suspect-data, tables disagree (mismatch)"
    assert row.checks["order"] == "FAIL: order 4, expected 2"
    assert row.status == "FAIL"


def test_unflagged_rows_keep_failures(verifier):
    row = verifier._row("6/8", "K_6", {"order": "FAIL: order 4, expected 8"})
    assert row.status == "FAIL"


def test_raising_check_is_reported_as_failure():
    def broken():
        raise np.linalg.LinAlgError("Singular matrix")

    checks = {}
    verification.VerificationService._guard(checks, "gamma", broken)
    assert checks["gamma"] == "FAIL: LinAlgError: Singular matrix"
    verification.VerificationService._guard(checks, "mu", lambda: str(1 / 0))
    assert checks["mu"].startswith("FAIL: ZeroDivisionError")
    verification.VerificationService._guard(checks, "dim", lambda: int("x"))
    assert checks["dim"].startswith("FAIL: ValueError")


def test_hermite_tolerance():
    value = 1.5176380902050415
    assert verification.close_to(value + 5e-10, value)
    assert not verification.close_to(value + 5e-9, value)


def test_unknown_table(verifier):
    with pytest.raises(NotFound):
        verifier.verify_table("99")


@pytest.mark.parametrize("table_id", ["2", "8", "15", "constants", "identities"])
def test_small_tables_hold(verifier, table_id):
    report = verifier.verify_table(table_id)
    assert report.rows
    failures = [row.to_dict() for row in report.rows if row.status == "FAIL"]
    assert report.ok, failures


def test_rank_two_rows_pass(verifier):
    report = verifier.verify_table("8")
    statuses = {row.name: row.status for row in report.rows}
    assert statuses["F_2"] == "PASS"
    assert statuses["J_2"] == "PASS"


def test_constant_rows(verifier):
    report = verifier.verify_table("constants")
    statuses = {row.row_id: row.status for row in report.rows}
    assert statuses["sqrt2"] == "PASS"
    assert statuses["epsilon"] == "SKIPPED"


def test_census_separates_rank_two_involutions(verifier):
    report = verifier.census_distinct(2, 2)
    assert [row.name for row in report.rows] == ["I_2^-", "I_{1,1}", "R_2"]
    assert all(row.status == "PASS" for row in report.rows)


def test_census_of_empty_cell(verifier):
    report = verifier.census_distinct(2, 5)
    assert len(report.rows) == 1
    assert report.rows[0].status == "SKIPPED"
