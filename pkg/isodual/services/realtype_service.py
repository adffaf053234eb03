"""
Real classification of isodual types: Psi_{k,l} spectral split, signatures and real splittings
"""

import logging
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import sympy
from scipy.linalg import block_diag, orth, schur, svd

from ..models import AlgType, BlockSpec, RealSignature, RealSplit
from ..utils.validators import InvalidIndex, NumericalInstability, SplitFailed, ValidationError
from . import exact_service as exact

logger = logging.getLogger(__name__)

SPLIT_TOLERANCE = 1e-9
_RANK_TOLERANCE = 1e-8


def index_set(k: int) -> List[int]:
    """Admissible l for conductor k"""
    if k in (1, 2):
        return [1]
    if k < 1:
        raise InvalidIndex(f"Conductor {k} must be positive")
    return [l for l in range(1, (k + 1) // 2) if gcd(k, l) == 1 and 2 * l < k]


def _check_index(k: int, l: int) -> None:
    if k < 1 or l not in index_set(k):
        raise InvalidIndex(f"({k},{l}) is not an admissible index")


def psi_poly(k: int, l: int) -> sympy.Poly:
    """x - 1, x + 1 or x^2 - 2cos(2 pi l/k) x + 1"""
    _check_index(k, l)
    x = exact.x
    if k == 1:
        return sympy.Poly(x - 1, x)
    if k == 2:
        return sympy.Poly(x + 1, x)
    return sympy.Poly(x**2 - 2 * sympy.cos(2 * sympy.pi * l / k) * x + 1, x)


def psi_at(k: int, l: int, M: np.ndarray) -> np.ndarray:
    """Evaluate Psi_{k,l} at a float matrix"""
    _check_index(k, l)
    identity = np.eye(M.shape[0])
    if k == 1:
        return M - identity
    if k == 2:
        return M + identity
    c = np.cos(2 * np.pi * l / k)
    return M @ M - 2 * c * M + identity


def angle(k: int, l: int) -> float:
    """Rotation angle pi l/k of the canonical Hermitian block"""
    return np.pi * l / k


def cyclotomic_exponents(a: AlgType) -> Dict[int, int]:
    """Multiplicity of each Phi_k in chi(R)"""
    remaining = exact.char_poly(a.R)
    exponents: Dict[int, int] = {}
    for k in sympy.divisors(a.order):
        phi_k = exact.cyclotomic(k)
        count = 0
        while True:
            quotient, remainder = remaining.div(phi_k)
            if not remainder.is_zero:
                break
            remaining = quotient
            count += 1
        if count:
            exponents[k] = count
    if remaining.degree() != 0:
        raise ArithmeticError("chi(R) is not a product of cyclotomic factors")
    return exponents


def multiplicities(a: AlgType) -> Dict[Tuple[int, int], int]:
    """m_{k,l}: exponent of Psi_{k,l} in chi(R) over the reals"""
    return {
        (k, l): e for k, e in cyclotomic_exponents(a).items() for l in index_set(k)
    }


def kernel_basis(M: np.ndarray, tol: float = _RANK_TOLERANCE) -> np.ndarray:
    """Orthonormal kernel basis; singular values at most tol * max(1, |M|) count as zero"""
    M = np.atleast_2d(np.asarray(M, dtype=float))
    _, sigma, Vh = svd(M)
    threshold = tol * max(1.0, float(sigma[0]) if sigma.size else 0.0)
    rank = int(np.sum(sigma > threshold))
    return Vh[rank:].T.conj()


def _eigenspace(a: AlgType, k: int, l: int, expected_dim: int) -> np.ndarray:
    R_dual = np.array(exact.dual_inverse(a.R).tolist(), dtype=float)
    W = kernel_basis(psi_at(k, l, R_dual))
    if W.shape[1] != expected_dim:
        raise NumericalInstability(
            f"Eigenspace W_({k},{l}) has dimension {W.shape[1]}, expected {expected_dim}"
        )
    return W


def _inertia(S: np.ndarray) -> Tuple[int, int]:
    values = np.linalg.eigvalsh((S + S.T) / 2)
    scale = max(1.0, float(np.max(np.abs(values)))) if values.size else 1.0
    if values.size and np.min(np.abs(values)) < _RANK_TOLERANCE * scale:
        raise NumericalInstability("Degenerate restricted form")
    return int(np.sum(values > 0)), int(np.sum(values < 0))


def _float(M) -> np.ndarray:
    return np.array(sympy.Matrix(M).tolist(), dtype=float)


def _eigenblocks(a: AlgType) -> List[Tuple[int, int, np.ndarray]]:
    """(k, l, W) in block-plan order: k=1, k=2, then Hermitian blocks by (k, l)"""
    mult = multiplicities(a)
    blocks = []
    for (k, l) in sorted(mult):
        m = mult[(k, l)]
        dim = m if k <= 2 else 2 * m
        blocks.append((k, l, _eigenspace(a, k, l, dim)))
    return blocks


def signature(a: AlgType) -> RealSignature:
    F = _float(a.F)
    p = q = g = 0
    herm = []
    for k, l, W in _eigenblocks(a):
        restricted = W.T @ F @ W
        if k == 1:
            p, q = _inertia(restricted)
        elif k == 2:
            if W.shape[1] % 2:
                raise NumericalInstability("Alternating component has odd dimension")
            g = W.shape[1] // 2
        else:
            positive, negative = _inertia((restricted + restricted.T) / 2)
            if positive % 2 or negative % 2:
                raise NumericalInstability(f"Odd inertia on W_({k},{l})")
            herm.append(((k, l), (positive // 2, negative // 2)))
    return RealSignature(p=p, q=q, g=g, herm=tuple(sorted(herm)))


def dimension(s: RealSignature) -> int:
    """pq + g(g+1) + 2 sum p_kl q_kl"""
    return s.p * s.q + s.g * (s.g + 1) + 2 * sum(a * b for _, (a, b) in s.herm)


def blocks_for(s: RealSignature) -> List[BlockSpec]:
    """Canonical block plan of a signature"""
    blocks = []
    if s.p + s.q:
        blocks.append(BlockSpec("SYM", p=s.p, q=s.q))
    if s.g:
        blocks.append(BlockSpec("ALT", g=s.g))
    for (k, l), (positive, negative) in s.herm:
        blocks.append(BlockSpec("HERM", k=k, l=l, signs=(1,) * positive + (-1,) * negative))
    return blocks


def rotation(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def canonical_block_matrix(block: BlockSpec) -> np.ndarray:
    if block.kind == "SYM":
        return np.diag([1.0] * block.p + [-1.0] * block.q)
    if block.kind == "SYMII":
        m = block.g
        zero, one = np.zeros((m, m)), np.eye(m)
        return np.block([[zero, one], [one, zero]])
    if block.kind == "ALT":
        m = block.g
        zero, one = np.zeros((m, m)), np.eye(m)
        return np.block([[zero, one], [-one, zero]])
    if block.kind == "HERM":
        _check_index(block.k, block.l)
        r = rotation(angle(block.k, block.l))
        return block_diag(*[s * r for s in block.signs])
    raise ValidationError(f"Unknown block kind {block.kind}")


def canonical_sum(blocks: Sequence[BlockSpec]) -> np.ndarray:
    return block_diag(*[canonical_block_matrix(b) for b in blocks])


def block_signature(blocks: Sequence[BlockSpec]) -> RealSignature:
    """Signature of a block plan (SYMII(m) counts as (m, m))"""
    p = q = g = 0
    herm: Dict[Tuple[int, int], Tuple[int, int]] = {}
    for b in blocks:
        if b.kind == "SYM":
            p, q = p + b.p, q + b.q
        elif b.kind == "SYMII":
            p, q = p + b.g, q + b.g
        elif b.kind == "ALT":
            g += b.g
        else:
            positive = sum(1 for s in b.signs if s > 0)
            old = herm.get((b.k, b.l), (0, 0))
            herm[(b.k, b.l)] = (old[0] + positive, old[1] + len(b.signs) - positive)
    return RealSignature(p=p, q=q, g=g, herm=tuple(sorted(herm.items())))


def _split_symmetric(A: np.ndarray) -> np.ndarray:
    values, vectors = np.linalg.eigh((A + A.T) / 2)
    order = np.argsort(-values)
    values, vectors = values[order], vectors[:, order]
    return vectors / np.sqrt(np.abs(values))


def _split_alternating(A: np.ndarray) -> np.ndarray:
    T, Z = schur((A - A.T) / 2, output="real")
    n = A.shape[0]
    columns = []
    i = 0
    while i < n:
        if i + 1 >= n or abs(T[i + 1, i]) < _RANK_TOLERANCE and abs(T[i, i + 1]) < _RANK_TOLERANCE:
            raise NumericalInstability("Alternating block is degenerate")
        b = T[i, i + 1]
        u, v = Z[:, i], Z[:, i + 1]
        if b < 0:
            u, v = v, u
        scale = 1.0 / np.sqrt(abs(b))
        columns.append((u * scale, v * scale))
        i += 2
    firsts = [u for u, _ in columns]
    seconds = [v for _, v in columns]
    return np.column_stack(firsts + seconds)


def _split_hermitian(A: np.ndarray, k: int, l: int) -> Tuple[np.ndarray, Tuple[int, ...]]:
    theta = angle(k, l)
    S = (A + A.T) / 2
    K = (A - A.T) / 2
    j = np.linalg.solve(S, K) / np.tan(theta)
    remaining = np.eye(A.shape[0])
    pairs, signs = [], []
    while remaining.shape[1]:
        values, vectors = np.linalg.eigh(remaining.T @ S @ remaining)
        pick = -1 if values[-1] > 0 else 0
        v = remaining @ vectors[:, pick]
        norm = v @ S @ v
        v = v * np.sqrt(np.cos(theta) / abs(norm))
        w = j @ v
        pairs.extend([v, w])
        signs.append(1 if norm > 0 else -1)
        constraints = (remaining.T @ S @ np.column_stack([v, w])).T
        complement = kernel_basis(constraints)
        if complement.shape[1] != remaining.shape[1] - 2:
            raise NumericalInstability(f"Hermitian pairing failed on W_({k},{l})")
        remaining = orth(remaining @ complement) if complement.shape[1] else complement
    return np.column_stack(pairs), tuple(signs)


def split_from_plan(
    F, P, blocks: Sequence[BlockSpec], source: str = "catalog", tol: float = SPLIT_TOLERANCE
) -> RealSplit:
    """Check P F0 P' = F for a given plan"""
    F = _float(F)
    P = np.asarray(P, dtype=float)
    F0 = canonical_sum(blocks)
    if P.shape != F.shape or F0.shape != F.shape:
        raise SplitFailed(f"Shapes P {P.shape}, F0 {F0.shape}, F {F.shape} disagree")
    residual = float(np.max(np.abs(P @ F0 @ P.T - F)))
    if residual > tol:
        raise SplitFailed(f"Residual {residual:.3e} exceeds {tol:.1e}")
    return RealSplit(P=P, blocks=list(blocks), F0=F0, residual=residual, source=source)


def real_split(a: AlgType, tol: float = SPLIT_TOLERANCE) -> RealSplit:
    """P with P F0 P' = F, F0 the canonical block sum of the signature"""
    s = signature(a)
    blocks = blocks_for(s)
    F0 = canonical_sum(blocks)
    F = _float(a.F)
    if np.array_equal(F, F0):
        return split_from_plan(a.F, np.eye(a.n), blocks, source="identity", tol=tol)

    bases, changes, plan = [], [], []
    eigenblocks = _eigenblocks(a)
    for k, l, W in eigenblocks:
        restricted = W.T @ F @ W
        bases.append(W)
        if k == 1:
            changes.append(_split_symmetric(restricted))
        elif k == 2:
            changes.append(_split_alternating(restricted))
        else:
            C, signs = _split_hermitian(restricted, k, l)
            changes.append(C)
            plan.append(BlockSpec("HERM", k=k, l=l, signs=signs))

    ordered = [b for b in blocks if b.kind != "HERM"] + plan
    Q = np.column_stack(bases)
    N = block_diag(*changes)
    try:
        P = np.linalg.inv(Q @ N).T
    except np.linalg.LinAlgError as e:
        raise SplitFailed(f"Eigenblock bases are singular: {e}")

    result = split_from_plan(a.F, P, ordered, source="computed", tol=tol)
    logger.debug(f"Real split of {a.name or 'type'} with residual {result.residual:.2e}")
    return result


def sign_normalized(s: RealSignature, t: RealSignature) -> bool:
    """Signatures agree up to the global sign"""
    return s.normalized() == t.normalized()
