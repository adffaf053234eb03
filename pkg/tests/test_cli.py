"""
Tests for the command line
"""

import json

import pytest

from isodual.cli import run
from isodual.utils.helpers import validate_output


def test_classify_f2(invoke):
    result = invoke("classify", "--matrix", "[[1,-1],[0,1]]")
    assert result.exit_code == 0
    assert result.output.strip() == (
        "isodual, order 6, principal: no, signature ((0,0);0;{(6,1)→(1,0)})"
    )


def test_classify_accepts_semicolon_rows(invoke):
    result = invoke("classify", "--matrix", "0 1; -1 0")
    assert result.exit_code == 0
    assert "order 2, principal: yes" in result.output


def test_classify_by_name(invoke):
    result = invoke("classify", "--name", "I_1F_2")
    assert result.exit_code == 0
    assert "order 6" in result.output


def test_not_isodual_is_a_domain_error(invoke):
    result = invoke("classify", "--matrix", "[[1,2],[0,1]]")
    assert result.exit_code == 1


def test_bad_entries_are_usage_errors(invoke):
    result = invoke("classify", "--matrix", "[[1,x],[0,1]]")
    assert result.exit_code == 2


def test_matrix_and_name_are_exclusive(invoke):
    result = invoke("classify", "--matrix", "[[1,0],[0,1]]", "--name", "F_2")
    assert result.exit_code == 2


def test_unknown_option_is_usage_error(invoke):
    assert invoke("classify", "--bogus").exit_code == 2


def test_bound_out_of_range(invoke):
    assert invoke("--bound", "50", "classify", "--name", "F_2").exit_code == 2


def test_decompose(invoke):
    result = invoke("decompose", "--name", "I_1F_2")
    assert result.exit_code == 0
    assert "M_1: rank 1" in result.output
    assert "M_6: rank 2" in result.output


def test_signature(invoke):
    result = invoke("signature", "--matrix", "[[0,1],[-1,0]]")
    assert result.exit_code == 0
    assert "dim V_F = 2" in result.output


def test_embed_half_plane_basepoint(invoke):
    result = invoke("embed", "--model", "v21", "--z", "i")
    assert result.exit_code == 0
    assert "member of V_I_{2,1}: yes" in result.output


def test_embed_needs_parameters(invoke):
    assert invoke("embed", "--model", "klein").exit_code == 2


def test_min_of_registered_witness(invoke):
    result = invoke("min", "--name", "W_6")
    assert result.exit_code == 0
    assert "PASS" in result.output


def test_min_of_hexagonal_form(invoke):
    result = invoke("min", "--gram", "[[2/sqrt(3), -1/sqrt(3)], [-1/sqrt(3), 2/sqrt(3)]]")
    assert result.exit_code == 0
    assert result.output.startswith("min = 1.154700538379, pairs = 3")


def test_include(invoke):
    assert invoke("include", "--from", "L_4", "--to", "J_4").output.strip() == "true"
    assert invoke("include", "--from", "[[1,0],[0,-1]]", "--to", "J_2").output.strip() == "true"
    assert invoke("include", "--from", "[[1,0],[0,-1]]", "--to", "U_2").output.strip() == "false"


def test_include_rank_mismatch(invoke):
    assert invoke("include", "--from", "F_2", "--to", "G_3").exit_code == 1


def test_certify_point(invoke):
    result = invoke("certify", "--name", "F_2")
    assert result.exit_code == 0
    assert "local max: yes" in result.output


def test_verify_small_table(invoke):
    result = invoke("verify", "--table", "2")
    assert result.exit_code == 0
    assert result.output.strip().endswith("OK")


def test_verify_unknown_table(invoke):
    assert invoke("verify", "--table", "99").exit_code == 1


def test_census(invoke):
    result = invoke("census", "--n", "2", "--d", "2")
    assert result.exit_code == 0
    assert "census 2/2" in result.output


@pytest.mark.parametrize(
    "args",
    [
        ["classify", "--name", "F_2"],
        ["decompose", "--name", "G_3"],
        ["signature", "--name", "K_4"],
        ["embed", "--model", "v21", "--z", "i"],
        ["min", "--name", "A_2"],
        ["include", "--from", "L_4", "--to", "J_4"],
        ["certify", "--name", "F_2"],
        ["verify", "--table", "2"],
        ["census", "--n", "2", "--d", "2"],
    ],
)
def test_json_output_matches_schema(invoke, args):
    result = invoke("--json", *args)
    assert result.exit_code == 0
    payload = json.loads(result.output)
    assert payload["schema"] == f"isodual.{args[0]}/1"
    validate_output(payload)


def test_run_returns_exit_codes(capsys):
    assert run(["--config", "testing", "classify", "--name", "F_2"]) == 0
    assert run(["--config", "testing", "classify", "--matrix", "[[1,2],[0,1]]"]) == 1
    assert run(["--config", "testing", "classify", "--bogus"]) == 2
    capsys.readouterr()


def test_config_follows_environment(monkeypatch):
    from config import DevelopmentConfig, TestingConfig, get_config

    monkeypatch.setenv("ISODUAL_ENV", "testing")
    assert get_config() is TestingConfig
    monkeypatch.setenv("ISODUAL_ENV", "nonexistent")
    assert get_config() is DevelopmentConfig


def test_init_app_sets_mpmath_precision(monkeypatch):
    import mpmath

    from config import TestingConfig
    from isodual import IsodualApp

    monkeypatch.setattr(TestingConfig, "MPMATH_DPS", 40)
    previous = mpmath.mp.dps
    try:
        TestingConfig.init_app(IsodualApp(TestingConfig))
        assert mpmath.mp.dps == 40
    finally:
        mpmath.mp.dps = previous
