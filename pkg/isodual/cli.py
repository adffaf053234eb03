"""
Command line front end
"""

import logging
import sys
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import click
import numpy as np

from . import create_app
from .models import AlgType, BlockSpec, GeoType
from .services import automorphism_service as automorphisms
from .services import density_service as density
from .services import geometry_service as geometry
from .services import realtype_service as realtypes
from .services import type_service as types
from .services.verification_service import ALL_TABLES, VerificationService
from .utils import expressions
from .utils.decorators import EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, handle_errors, log_timing
from .utils.helpers import (
    build_response,
    dump_json,
    float_matrix_to_dict,
    format_int_matrix,
    format_matrix,
    format_report,
    format_signature,
)
from .utils.validators import InputValidator, ValidationError

logger = logging.getLogger(__name__)

EMBED_MODELS = ("siegel", "klein", "hermitian", "v22", "v21", "w11", "i1f4", "f6")


@dataclass
class CliState:
    app: Any
    as_json: bool
    tolerance: float
    bound: int
    verbose: bool

    @property
    def catalog(self):
        return self.app.catalog


def _emit(state: CliState, verb: str, payload: Dict[str, Any], lines: Sequence[str]) -> None:
    if state.as_json:
        click.echo(dump_json(build_response(verb, payload)))
    else:
        for line in lines:
            click.echo(line)


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def _load_type(state: CliState, matrix: Optional[str], name: Optional[str]) -> AlgType:
    """Exactly one of an inline/file matrix or a catalog name"""
    if bool(matrix) == bool(name):
        raise ValidationError("Give exactly one of --matrix and --name")
    if name:
        return state.catalog.type_from_name(name)
    M = InputValidator.parse_int_matrix(matrix)
    InputValidator.validate_unimodular(M)
    return types.make_type(M)


def _load_geotype(state: CliState, spec: str) -> GeoType:
    """A catalog name, or a bracketed integer matrix"""
    if spec.strip().startswith("[") or ";" in spec:
        M = InputValidator.parse_int_matrix(spec)
        InputValidator.validate_unimodular(M)
        return geometry.make_geotype(types.make_type(M), tol=max(state.tolerance, 1e-9))
    return state.catalog.geotype_for(spec)


def _load_alg(state: CliState, spec: str) -> AlgType:
    if spec.strip().startswith("[") or ";" in spec:
        M = InputValidator.parse_int_matrix(spec)
        InputValidator.validate_unimodular(M)
        return types.make_type(M)
    return state.catalog.type_from_name(spec)


@click.group(name="isodual")
@click.option("--json", "as_json", is_flag=True, help="Structured output")
@click.option("--tolerance", type=float, default=None, help="Numerical tolerance (default from config)")
@click.option("--bound", type=int, default=None, help="Sup-norm search bound B")
@click.option("--verbose", "-v", is_flag=True, help="Debug logging and printed tolerances")
@click.option(
    "--config", "config_name", type=click.Choice(("development", "testing", "default")),
    default=None, help="Configuration profile",
)
@click.pass_context
def cli(ctx, as_json, tolerance, bound, verbose, config_name):
    """Isodual lattices: types, signatures, Gram varieties and density"""
    app = create_app(config_name)
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    if tolerance is not None and not 0 < tolerance < 1:
        raise click.BadParameter("must lie in (0, 1)", param_hint="--tolerance")
    try:
        bound = InputValidator.validate_bound(bound)
    except ValidationError as e:
        raise click.BadParameter(str(e), param_hint="--bound")

    state = CliState(
        app=app,
        as_json=as_json,
        tolerance=tolerance if tolerance is not None else app.config["TOLERANCE"],
        bound=bound if bound is not None else app.config["SEARCH_BOUND"],
        verbose=verbose,
    )
    if verbose:
        click.echo(
            f"tolerance = {state.tolerance:g}, root tolerance = {app.config['ROOT_TOLERANCE']:g}, "
            f"bound = {state.bound}, max group order = {app.config['MAX_GROUP_ORDER']}",
            err=True,
        )
    ctx.obj = state


# Algebra


@cli.command()
@click.option("--matrix", "-m", help="Integer matrix, inline or a file")
@click.option("--name", "-n", help="Catalog name such as I_1F_4")
@click.pass_obj
@handle_errors
@log_timing
def classify(state: CliState, matrix, name):
    """Isoduality, order of R, principality and real signature"""
    a = _load_type(state, matrix, name)
    signature = realtypes.signature(a)
    payload = {
        "isodual": True,
        "type": a.to_dict(),
        "signature": signature.to_dict(),
        "signature_text": format_signature(signature),
        "dimension": realtypes.dimension(signature),
    }
    line = f"isodual, order {a.order}, principal: {_yes(a.principal)}, signature {format_signature(signature)}"
    _emit(state, "classify", payload, [line])


@cli.command()
@click.option("--matrix", "-m", help="Integer matrix, inline or a file")
@click.option("--name", "-n", help="Catalog name")
@click.pass_obj
@handle_errors
@log_timing
def decompose(state: CliState, matrix, name):
    """Canonical decomposition into the eigen-components M_k"""
    a = _load_type(state, matrix, name)
    decomposition = types.canonical_decomposition(a)
    parity = types.symmetric_parity(a, decomposition)

    lines = [f"index {decomposition.index}" + (f", symmetric part {parity}" if parity else "")]
    for component in decomposition.components:
        lines.append(f"M_{component.k}: rank {component.basis.cols}")
        lines.extend(f"  {row}" for row in format_int_matrix(component.block).splitlines())
    payload = {"type": a.to_dict(), "decomposition": decomposition.to_dict(), "parity": parity}
    _emit(state, "decompose", payload, lines)


@cli.command()
@click.option("--matrix", "-m", help="Integer matrix, inline or a file")
@click.option("--name", "-n", help="Catalog name")
@click.pass_obj
@handle_errors
@log_timing
def signature(state: CliState, matrix, name):
    """Real signature, dim V_F and the canonical block plan"""
    a = _load_type(state, matrix, name)
    sig = realtypes.signature(a)
    blocks = realtypes.blocks_for(sig)
    dim = realtypes.dimension(sig)
    payload = {
        "signature": sig.to_dict(),
        "signature_text": format_signature(sig),
        "dimension": dim,
        "blocks": [b.to_dict() for b in blocks],
    }
    lines = [format_signature(sig), f"dim V_F = {dim}", f"blocks: {sig}"]
    _emit(state, "signature", payload, lines)


# Geometry


def _complex_matrix(text: str, shape: Optional[tuple] = None) -> np.ndarray:
    rows = InputValidator.parse_expression_rows(text, shape)
    return np.array([[expressions.evaluate_complex(v) for v in row] for row in rows], dtype=complex)


def _real_matrix(text: str, shape: Optional[tuple] = None) -> np.ndarray:
    rows = InputValidator.parse_expression_rows(text, shape)
    return np.array([[expressions.evaluate(v) for v in row] for row in rows], dtype=float)


def _need(value, option: str):
    if value is None:
        raise ValidationError(f"{option} is required for this model")
    return value


def _herm_form(p: int, q: int) -> np.ndarray:
    return realtypes.canonical_block_matrix(BlockSpec("HERM", k=4, l=1, signs=(1,) * p + (-1,) * q))


def _embed_point(state: CliState, model: str, z, w, param, p, q, disc: bool):
    """(A, integer F or None, real F0 or None, label)"""
    catalog = state.catalog
    if model == "siegel":
        Z = _complex_matrix(_need(param, "--param"))
        g = Z.shape[0]
        return geometry.siegel_embed(Z), catalog.build_matrix(f"J_{2 * g}"), None, f"J_{2 * g}"
    if model == "klein":
        p, q = _need(p, "--p"), _need(q, "--q")
        X = _real_matrix(_need(param, "--param"), (p, q))
        return geometry.klein_embed(p, q, X), catalog.build_matrix(f"I_{{{p},{q}}}"), None, f"I_{{{p},{q}}}"
    if model == "hermitian":
        p, q = _need(p, "--p"), _need(q, "--q")
        Z = _complex_matrix(_need(param, "--param"), (p, q))
        return geometry.hermitian_embed(p, q, Z), None, _herm_form(p, q), f"HERM({p},{q})"
    if model == "v22":
        z, w = InputValidator.parse_complex(_need(z, "--z")), InputValidator.parse_complex(_need(w, "--w"))
        return geometry.v22II_embed(z, w), catalog.build_matrix("U_4"), None, "U_4"
    if model == "v21":
        z = InputValidator.parse_complex(_need(z, "--z"))
        A = geometry.v21_disc(z) if disc else geometry.v21_halfplane(z)
        return A, catalog.build_matrix("I_{2,1}"), None, "I_{2,1}"
    if model == "w11":
        z = InputValidator.parse_complex(_need(z, "--z"))
        A = geometry.w11_disc(z) if disc else geometry.w11_halfplane(z)
        return A, None, _herm_form(1, 1), "HERM(1,1)"
    if model == "i1f4":
        z, w = InputValidator.parse_complex(_need(z, "--z")), InputValidator.parse_complex(_need(w, "--w"))
        return geometry.i1f4_point(w, z), catalog.build_matrix("I_1F_4"), None, "I_1F_4"
    z = InputValidator.parse_complex(_need(z, "--z"))
    return geometry.f6_point(z), catalog.build_matrix("F_6"), None, "F_6"


@cli.command()
@click.option("--model", type=click.Choice(EMBED_MODELS), required=True)
@click.option("--z", "z", help="Point of the upper half-plane (or the disc with --disc)")
@click.option("--w", "w", help="Second half-plane point for v22 and i1f4")
@click.option("--param", help="Matrix parameter for siegel, klein and hermitian")
@click.option("--p", "p", type=int)
@click.option("--q", "q", type=int)
@click.option("--disc", is_flag=True, help="Disc model for v21 and w11")
@click.pass_obj
@handle_errors
@log_timing
def embed(state: CliState, model, z, w, param, p, q, disc):
    """Gram matrix of an explicit parametrization, with its membership check"""
    A, F, F0, target = _embed_point(state, model, z, w, param, p, q, disc)
    if F is not None:
        residual = geometry.membership_residual(A, F)
        member = geometry.membership(A, F, tol=state.tolerance)
    else:
        residual = float(np.max(np.abs(A @ np.linalg.inv(F0.T) @ A - F0)))
        member = geometry.real_membership(A, F0, tol=state.tolerance)

    payload = {
        "model": model,
        "gram": float_matrix_to_dict(A),
        "member_of": target,
        "member": bool(member),
        "residual": residual,
    }
    lines = [format_matrix(A), f"member of V_{target}: {_yes(member)} (residual {residual:.2e})"]
    _emit(state, "embed", payload, lines)


# Density


@cli.command(name="min")
@click.option("--name", "-n", help="Registered Gram matrix, e.g. W_6 or A_2+Lambda_3")
@click.option("--gram", "-g", help="Gram matrix of radical expressions, inline or a file")
@click.pass_obj
@handle_errors
@log_timing
def minimum(state: CliState, name, gram):
    """Minimum, minimal vectors and Hermite invariant"""
    if bool(name) == bool(gram):
        raise ValidationError("Give exactly one of --name and --gram")
    A = state.catalog.witness_gram(name) if name else expressions.matrix_from_expressions(
        InputValidator.parse_gram(gram)
    )
    short = density.shortest_vectors(A)
    hermite = density.hermite(A)

    constants = [
        density.verify_constant(key, state.catalog.witness_gram)
        for key, spec in density.CONSTANTS.items()
        if name and spec.witness == name
    ]
    brute = density.brute_force_min(A, state.bound) if A.shape[0] <= 4 else None

    line = f"min = {hermite:.12f}, pairs = {short.pairs}"
    for report in constants:
        line += f", equals {report.closed_form} = {report.expected:.12f}: {report.status}"
    lines = [line]
    if brute is not None and state.verbose:
        lines.append(f"brute force (B = {state.bound}): min = {brute.min:.12f}, pairs = {brute.pairs}")

    payload = {
        "name": name,
        "min": short.min,
        "hermite": hermite,
        "pairs": short.pairs,
        "vectors": [list(v) for v in short.vectors],
        "constants": [r.to_dict() for r in constants],
        "brute_force": brute.to_dict() if brute is not None else None,
    }
    _emit(state, "min", payload, lines)


@cli.command()
@click.option("--from", "source", required=True, help="Contained type: name or matrix")
@click.option("--to", "target", required=True, help="Containing type: name or matrix")
@click.pass_obj
@handle_errors
@log_timing
def include(state: CliState, source, target):
    """Is V_from contained in V_to"""
    f = _load_geotype(state, source)
    g = _load_alg(state, target)
    result = automorphisms.includes(f, g, max_order=int(state.app.config["MAX_GROUP_ORDER"]))
    _emit(state, "include", {"from": source, "to": target, "includes": result}, ["true" if result else "false"])


@cli.command()
@click.option("--name", "-n", required=True, help="Catalog type")
@click.option("--gram", "-g", help="Registered Gram matrix to certify instead of the basepoint")
@click.pass_obj
@handle_errors
@log_timing
def certify(state: CliState, name, gram):
    """Relative perfection and eutaxy of a point of V_F"""
    gt = state.catalog.geotype_for(name)
    A = state.catalog.witness_gram(gram) if gram else gt.basepoint
    geometry.require_member(A, gt.F, tol=max(state.tolerance, 1e-8))
    certificate = density.certify_local_max(gt, A)

    line = (
        f"min = {certificate.min:.12f}, pairs = {certificate.pairs}, dim = {certificate.dimension}, "
        f"rank = {certificate.rank}, perfect: {_yes(certificate.perfect_rel)}, "
        f"eutactic: {_yes(certificate.eutactic_rel)}, local max: {_yes(certificate.is_local_max)}"
    )
    _emit(state, "certify", {"name": name, "gram": gram, **certificate.to_dict()}, [line])


# Tables


def _verifier(state: CliState) -> VerificationService:
    config = dict(state.app.config)
    config["TOLERANCE"] = state.tolerance
    return VerificationService(state.catalog, config)


@cli.command()
@click.option("--table", "-t", "tables", multiple=True, help=f"Table id ({', '.join(ALL_TABLES)}) or all")
@click.pass_context
@handle_errors
@log_timing
def verify(ctx, tables):
    """Re-derive tables; exits 0 only if no row fails"""
    state: CliState = ctx.obj
    wanted: List[str] = list(tables) or ["all"]
    if "all" in wanted:
        wanted = list(ALL_TABLES)

    verifier = _verifier(state)
    reports = [verifier.verify_table(table_id) for table_id in wanted]
    ok = all(report.ok for report in reports)

    lines = [line for report in reports for line in format_report(report, state.verbose)]
    lines.append("OK" if ok else "FAILED")
    _emit(state, "verify", {"tables": [r.to_dict() for r in reports], "ok": ok}, lines)
    ctx.exit(EXIT_OK if ok else EXIT_DOMAIN)


@cli.command()
@click.option("--n", "n", type=click.IntRange(1, 8), required=True)
@click.option("--d", "d", type=click.IntRange(2, None), required=True)
@click.pass_obj
@handle_errors
@log_timing
def census(state: CliState, n, d):
    """Listed torsion classes of order d in GL(n, Z), with separating invariants"""
    report = _verifier(state).census_distinct(n, d)
    _emit(state, "census", {"report": report.to_dict(), "ok": report.ok}, format_report(report, state.verbose))


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Dispatch one command line, returning the exit code"""
    try:
        result = cli.main(
            args=list(argv) if argv is not None else None, prog_name="isodual", standalone_mode=False
        )
    except click.UsageError as e:
        e.show()
        return EXIT_USAGE
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        return EXIT_DOMAIN
    except SystemExit as e:
        return int(e.code or 0)
    return result if isinstance(result, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(run())
