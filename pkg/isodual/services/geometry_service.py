"""
Gram-matrix varieties V_F = {A : A F^vee A = F}: membership, embeddings, parametrizations,
tangent spaces and length gradients
"""

import logging
from typing import List, Optional, Sequence

import numpy as np
from scipy.linalg import block_diag, expm, sqrtm

from ..models import AlgType, BlockSpec, GeoType, RealSplit, TangentFrame
from ..utils.validators import (
    NotInHalfPlane,
    NotInSiegelSpace,
    NotMember,
    OutsideBall,
    ValidationError,
)
from . import exact_service as exact
from . import realtype_service as realtypes

logger = logging.getLogger(__name__)

MEMBERSHIP_TOLERANCE = 1e-9
ROOT_TOLERANCE = 1e-7


def as_float(M) -> np.ndarray:
    if isinstance(M, np.ndarray):
        return M.astype(float)
    return np.array([[float(v) for v in row] for row in np.array(M.tolist(), dtype=object)])


def dual_float(F) -> np.ndarray:
    """F^vee of an integer type, exact then converted"""
    return as_float(exact.dual_inverse(F))


def membership_residual(A: np.ndarray, F) -> float:
    F_float = as_float(F)
    return float(np.max(np.abs(A @ dual_float(F) @ A - F_float)))


def is_positive_definite(A: np.ndarray) -> bool:
    if not np.allclose(A, A.T, atol=1e-12):
        return False
    try:
        np.linalg.cholesky(A)
    except np.linalg.LinAlgError:
        return False
    return True


def membership(A: np.ndarray, F, tol: float = MEMBERSHIP_TOLERANCE) -> bool:
    """A F^vee A = F and det A = 1, within tol"""
    A = np.asarray(A, dtype=float)
    if A.shape != (F.rows, F.cols) or not is_positive_definite(A):
        return False
    if abs(np.linalg.det(A) - 1.0) >= tol:
        return False
    return membership_residual(A, F) < tol


def require_member(A: np.ndarray, F, tol: float = MEMBERSHIP_TOLERANCE) -> None:
    if not membership(A, F, tol):
        raise NotMember(f"Point is not in V_F (residual {membership_residual(A, F):.2e})")


def real_membership(A: np.ndarray, F0: np.ndarray, tol: float = MEMBERSHIP_TOLERANCE) -> bool:
    """Membership for a real (canonical) form F0"""
    dual = np.linalg.inv(F0.T)
    return (
        is_positive_definite(A)
        and abs(np.linalg.det(A) - 1.0) < tol
        and float(np.max(np.abs(A @ dual @ A - F0))) < tol
    )


# Symmetric-space embeddings


def siegel_embed(Z) -> np.ndarray:
    """sigma_g(X + iY) = [[Y + X Y^-1 X, X Y^-1], [Y^-1 X, Y^-1]]"""
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    X, Y = Z.real, Z.imag
    if not (np.allclose(X, X.T) and np.allclose(Y, Y.T)):
        raise NotInSiegelSpace("Z must be symmetric")
    try:
        np.linalg.cholesky(Y)
    except np.linalg.LinAlgError:
        raise NotInSiegelSpace("Im Z must be positive definite")
    Y_inv = np.linalg.inv(Y)
    return np.block([[Y + X @ Y_inv @ X, X @ Y_inv], [Y_inv @ X, Y_inv]])


def klein_embed(p: int, q: int, X) -> np.ndarray:
    """phi_{p,q}(X) for X in the Klein ball X'X < I_q"""
    X = np.asarray(X, dtype=float).reshape(p, q)
    gap = np.eye(q) - X.T @ X
    try:
        np.linalg.cholesky(gap)
    except np.linalg.LinAlgError:
        raise OutsideBall("X'X - I_q must be negative definite")
    XXt = X @ X.T
    inner_p = np.linalg.inv(np.eye(p) - XXt)
    inner_q = np.linalg.inv(gap)
    return np.block(
        [
            [(np.eye(p) + XXt) @ inner_p, 2 * X @ inner_q],
            [2 * inner_q @ X.T, (np.eye(q) + X.T @ X) @ inner_q],
        ]
    )


def kappa(H: np.ndarray) -> np.ndarray:
    """Realification z -> [[Re z, -Im z], [Im z, Re z]] entrywise"""
    H = np.asarray(H, dtype=complex)
    m, n = H.shape
    out = np.zeros((2 * m, 2 * n))
    out[0::2, 0::2] = H.real
    out[0::2, 1::2] = -H.imag
    out[1::2, 0::2] = H.imag
    out[1::2, 1::2] = H.real
    return out


def hermitian_ball_form(p: int, q: int, Z) -> np.ndarray:
    """The (p+q) Hermitian matrix of W_{p,q} before realification"""
    Z = np.asarray(Z, dtype=complex).reshape(p, q)
    gap = np.eye(q) - Z.conj().T @ Z
    try:
        np.linalg.cholesky(gap)
    except np.linalg.LinAlgError:
        raise OutsideBall("Z*Z - I_q must be negative definite")
    ZZs = Z @ Z.conj().T
    inner_p = np.linalg.inv(np.eye(p) - ZZs)
    inner_q = np.linalg.inv(gap)
    return np.block(
        [
            [(np.eye(p) + ZZs) @ inner_p, 2 * Z @ inner_q],
            [2 * inner_q @ Z.conj().T, (np.eye(q) + Z.conj().T @ Z) @ inner_q],
        ]
    )


def hermitian_embed(p: int, q: int, Z) -> np.ndarray:
    return kappa(hermitian_ball_form(p, q, Z))


def symii_embed(m: int, X) -> np.ndarray:
    """V_{m,m}^II = P phi_{m,m}(X) P', P = (1/sqrt 2)[[I, -I], [I, I]]"""
    P = np.block([[np.eye(m), -np.eye(m)], [np.eye(m), np.eye(m)]]) / np.sqrt(2)
    return P @ klein_embed(m, m, X) @ P.T


def klein_v33II(X) -> np.ndarray:
    return symii_embed(3, X)


def _require_half_plane(*points: complex) -> None:
    for z in points:
        if complex(z).imag <= 0:
            raise NotInHalfPlane(f"{z} is not in the upper half-plane")


def cayley(z: complex) -> complex:
    """Upper half-plane to unit disc"""
    _require_half_plane(z)
    return (z - 1j) / (z + 1j)


def v21_disc(z: complex) -> np.ndarray:
    z = complex(z)
    return klein_embed(2, 1, [[z.real], [z.imag]])


def v21_halfplane(z: complex) -> np.ndarray:
    """Half-plane model of V_{2,1}; identity at z = i"""
    _require_half_plane(z)
    x, y = z.real, z.imag
    r2 = x * x + y * y
    r4 = r2 * r2
    M = np.array(
        [
            [2 * x * x + y * y, (r2 - 1) * x, (r2 + 1) * x],
            [(r2 - 1) * x, (r4 + 1) / 2 - x * x, (r4 - 1) / 2],
            [(r2 + 1) * x, (r4 - 1) / 2, (r4 + 1) / 2 + x * x],
        ]
    )
    return M / (y * y)


def w11_disc(z: complex) -> np.ndarray:
    return hermitian_embed(1, 1, [[complex(z)]])


def w11_halfplane(z: complex) -> np.ndarray:
    """Half-plane model of W_{1,1}; equals w11_disc(cayley(z))"""
    _require_half_plane(z)
    x, y = z.real, z.imag
    r2 = x * x + y * y
    M = np.array(
        [
            [1 + r2, 0, r2 - 1, 2 * x],
            [0, 1 + r2, -2 * x, r2 - 1],
            [r2 - 1, -2 * x, 1 + r2, 0],
            [2 * x, r2 - 1, 0, 1 + r2],
        ]
    )
    return M / (2 * y)


def v22II_embed(z: complex, w: complex) -> np.ndarray:
    """Two half-plane parametrization of V_{2,2}^II, a member of V_{U_4}"""
    _require_half_plane(z, w)
    z, w = complex(z), complex(w)
    a, b = z.real, w.real
    zz, ww = abs(z) ** 2, abs(w) ** 2
    M = np.array(
        [
            [zz, -zz * b, -a * b, -a],
            [-zz * b, zz * ww, a * ww, a * b],
            [-a * b, a * ww, ww, b],
            [-a, a * b, b, 1.0],
        ]
    )
    return M / (z.imag * w.imag)


def i1f4_point(w: complex, z: complex) -> np.ndarray:
    """A_{w,z} = P_{w,z} P_{w,z}' on V_{I_1 + F_4}; identity at (i, i)"""
    _require_half_plane(w, z)
    s, t = w.real, w.imag
    x, y = z.real, z.imag
    r = np.sqrt(y)
    P = np.array(
        [
            [2 * t * r, 0, 0, 2 * s * r, 2 * s * r],
            [-2 * s * t * r, t * t * r + t * y, t * t * r - t * y, -s * s * r - x * t, -s * s * r + x * t],
            [-2 * s * t * r, t * t * r - t * y, t * t * r + t * y, -s * s * r + x * t, -s * s * r - x * t],
            [0, 0, 0, r + t, r - t],
            [0, 0, 0, r - t, r + t],
        ]
    ) / (2 * t * r)
    return P @ P.T


def sl2_point(z: complex) -> np.ndarray:
    """M_z = (1/sqrt y)[[y, x], [0, 1]]"""
    _require_half_plane(z)
    x, y = z.real, z.imag
    return np.array([[y, x], [0.0, 1.0]]) / np.sqrt(y)


def f6_action(M: np.ndarray) -> np.ndarray:
    (a, b), (c, d) = M
    block = 0.5 * np.array(
        [
            [1 + a, 1 - a, b, -b],
            [1 - a, 1 + a, -b, b],
            [c, -c, 1 + d, 1 - d],
            [-c, c, 1 - d, 1 + d],
        ]
    )
    return block_diag(np.eye(2), block)


F6_BASEPOINT = 0.5 * np.array(
    [
        [4, 2, 0, 0, 0, 0],
        [2, 4, 0, 0, 2, 2],
        [0, 0, 3, 1, 1, 1],
        [0, 0, 1, 3, 1, 1],
        [0, 2, 1, 1, 3, 1],
        [0, 2, 1, 1, 1, 3],
    ],
    dtype=float,
)


def f6_point(z: complex) -> np.ndarray:
    """theta(M_z) . A_i on V_{F_6}"""
    T = f6_action(sl2_point(z))
    return T @ F6_BASEPOINT @ T.T


def ug3_action(M: np.ndarray) -> np.ndarray:
    (a, b), (c, d) = M
    return np.array(
        [
            [d * d, -c * c, 2 * c * d, -c * d, c * d],
            [-b * b, a * a, -2 * a * b, a * b, -a * b],
            [b * d, -a * c, a * d + b * c, (1 - a * d - b * c) / 2, (a * d + b * c - 1) / 2],
            [0, 0, 0, 1, 0],
            [0, 0, 0, 0, 1],
        ],
        dtype=float,
    )


def ug3_point(z: complex, lambda3: np.ndarray) -> np.ndarray:
    """theta(M_z) . (I_2 + Lambda_3) on V_{U_2 + G_3}"""
    T = ug3_action(sl2_point(z))
    base = block_diag(np.eye(2), lambda3)
    return T @ base @ T.T


def hermitian_w21(z: complex, w: complex) -> np.ndarray:
    """H_{z,w} for |z|^2 + |w|^2 < 1"""
    return hermitian_ball_form(2, 1, [[z], [w]])


def kg_point(z: complex, w: complex, P4: np.ndarray) -> np.ndarray:
    """P_4 (I_1 + kappa(H_{z,w})) P_4' on V_{K_4 + G_3}"""
    inner = block_diag(np.eye(1), kappa(hermitian_w21(z, w)))
    return P4 @ inner @ P4.T


def symplectic_act(M: np.ndarray, Z) -> np.ndarray:
    """(A Z + B)(C Z + D)^-1"""
    Z = np.atleast_2d(np.asarray(Z, dtype=complex))
    g = Z.shape[0]
    M = np.asarray(M, dtype=float)
    if M.shape != (2 * g, 2 * g):
        raise ValidationError(f"Symplectic matrix must be {2 * g}x{2 * g}")
    A, B, C, D = M[:g, :g], M[:g, g:], M[g:, :g], M[g:, g:]
    return (A @ Z + B) @ np.linalg.inv(C @ Z + D)


# Block parametrization


def block_point(block: BlockSpec, coord=None) -> np.ndarray:
    """Point of V_{F0} for one canonical block; None gives the identity"""
    if coord is None:
        return np.eye(block.size)
    if block.kind == "SYM":
        return klein_embed(block.p, block.q, coord)
    if block.kind == "SYMII":
        return symii_embed(block.g, coord)
    if block.kind == "ALT":
        return siegel_embed(coord)
    if block.kind == "HERM":
        positive = sum(1 for s in block.signs if s > 0)
        return hermitian_embed(positive, len(block.signs) - positive, coord)
    raise ValidationError(f"Unknown block kind {block.kind}")


def param_point(gt: GeoType, coords: Optional[Sequence] = None) -> np.ndarray:
    """P (+ block points) P'"""
    blocks = gt.split.blocks
    coords = list(coords) if coords is not None else [None] * len(blocks)
    if len(coords) != len(blocks):
        raise ValidationError(f"Expected {len(blocks)} block coordinates, got {len(coords)}")
    inner = block_diag(*[block_point(b, c) for b, c in zip(blocks, coords)])
    P = gt.split.P
    return P @ inner @ P.T


def make_geotype(
    alg: AlgType,
    split: Optional[RealSplit] = None,
    basepoint: Optional[np.ndarray] = None,
    tol: float = MEMBERSHIP_TOLERANCE,
) -> GeoType:
    split = split or realtypes.real_split(alg)
    if basepoint is None:
        basepoint = split.P @ split.P.T
    basepoint = np.asarray(basepoint, dtype=float)
    if not membership(basepoint, alg.F, tol):
        raise NotMember(
            f"Basepoint is not in V_F for {alg.name or 'type'} "
            f"(residual {membership_residual(basepoint, alg.F):.2e})"
        )
    return GeoType(alg=alg, split=split, basepoint=basepoint, signature=realtypes.signature(alg))


# Metric


def inner(A: np.ndarray, X: np.ndarray, Y: np.ndarray) -> float:
    """Tr(A^-1 X A^-1 Y)"""
    A_inv = np.linalg.inv(A)
    return float(np.trace(A_inv @ X @ A_inv @ Y))


def geodesic(A: np.ndarray, X: np.ndarray, t: float) -> np.ndarray:
    root = np.real(sqrtm(A))
    root_inv = np.linalg.inv(root)
    point = root @ expm(t * root_inv @ X @ root_inv) @ root
    return (point + point.T) / 2


def symmetry(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Geodesic symmetry s_A(B) = A B^-1 A"""
    point = A @ np.linalg.solve(B, A)
    return (point + point.T) / 2


# Tangent spaces


def sym_basis(n: int) -> List[np.ndarray]:
    basis = []
    for i in range(n):
        for j in range(i, n):
            E = np.zeros((n, n))
            E[i, j] = E[j, i] = 1.0
            basis.append(E)
    return basis


def sym_coords(X: np.ndarray) -> np.ndarray:
    n = X.shape[0]
    return np.array([X[i, j] for i in range(n) for j in range(i, n)])


def from_sym_coords(c: np.ndarray, n: int) -> np.ndarray:
    X = np.zeros((n, n))
    k = 0
    for i in range(n):
        for j in range(i, n):
            X[i, j] = X[j, i] = c[k]
            k += 1
    return X


def _conjugation_operator(A: np.ndarray, F) -> np.ndarray:
    """Matrix of X -> M X M' with M = A F^vee on symmetric coordinates"""
    M = A @ dual_float(F)
    return np.column_stack([sym_coords(M @ E @ M.T) for E in sym_basis(A.shape[0])])


def _cluster(values: np.ndarray, tol: float) -> List[complex]:
    centers: List[complex] = []
    for v in values:
        if not any(abs(v - c) < tol for c in centers):
            centers.append(v)
    return centers


def tangent_frame(A: np.ndarray, F, tol: float = MEMBERSHIP_TOLERANCE) -> TangentFrame:
    """T_A V_F = ker(Phi + I) and the annihilating polynomial f with (x+1) removed"""
    A = np.asarray(A, dtype=float)
    require_member(A, F, tol)
    L = _conjugation_operator(A, F)
    roots = [r for r in _cluster(np.linalg.eigvals(L), ROOT_TOLERANCE) if abs(r + 1) > ROOT_TOLERANCE]
    f = np.real_if_close(np.poly(roots), tol=1e6) if roots else np.array([1.0])
    kernel = realtypes.kernel_basis(L + np.eye(L.shape[0]))
    n = A.shape[0]
    basis = [from_sym_coords(kernel[:, i], n) for i in range(kernel.shape[1])]
    return TangentFrame(at=A, basis=basis, annihilator=np.real(f), operator=L)


def _poly_at_matrix(coeffs: np.ndarray, L: np.ndarray) -> np.ndarray:
    result = np.zeros_like(L)
    identity = np.eye(L.shape[0])
    for c in coeffs:
        result = result @ L + c * identity
    return result


def length_gradient(
    A: np.ndarray, F, u: Sequence[int], frame: Optional[TangentFrame] = None
) -> np.ndarray:
    """f(Phi)(A u u' A) / f(-1)"""
    u = np.asarray(u, dtype=float)
    if not np.any(u):
        raise ValidationError("u must be nonzero")
    frame = frame or tangent_frame(A, F)
    f = frame.annihilator
    if frame.dimension == 0:
        return np.zeros_like(frame.at)
    Au = frame.at @ u
    projected = _poly_at_matrix(f, frame.operator) @ sym_coords(np.outer(Au, Au))
    return from_sym_coords(projected / np.polyval(f, -1.0), frame.at.shape[0])
