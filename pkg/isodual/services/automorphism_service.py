"""
Automorphism groups Gamma_F of Gram varieties and the inclusion criterion
"""

import logging
from typing import List, Optional, Sequence

import numpy as np
import sympy
from sympy import ImmutableMatrix

from ..models import AlgType, GeoType, TangentFrame
from ..utils.validators import IsodualError, RankMismatch, SearchBudgetExceeded
from . import density_service as density
from . import exact_service as exact
from . import geometry_service as geometry
from . import type_service as types

logger = logging.getLogger(__name__)

FIX_TOLERANCE = 1e-9
MATCH_TOLERANCE = 1e-6
MAX_GROUP_ORDER = 50000


def fixes_pointwise(T, gt: GeoType, frame: Optional[TangentFrame] = None, tol: float = FIX_TOLERANCE) -> bool:
    """T A T' = A and T X T' = X for every tangent vector X at the basepoint"""
    T = np.asarray(ImmutableMatrix(T).tolist(), dtype=float)
    frame = frame or geometry.tangent_frame(gt.basepoint, gt.F)
    for M in [gt.basepoint] + frame.basis:
        if np.max(np.abs(T @ M @ T.T - M)) > tol * max(1.0, np.max(np.abs(M))):
            return False
    return True


def containers(gt: GeoType, group: Sequence[ImmutableMatrix]) -> List[ImmutableMatrix]:
    """F' T^vee for T in Gamma_F; each contains V_F"""
    F = gt.F
    return [ImmutableMatrix(F.T * exact.dual_inverse(T)) for T in group]


def includes(
    f: GeoType,
    g: AlgType,
    group: Optional[Sequence[ImmutableMatrix]] = None,
    max_order: int = MAX_GROUP_ORDER,
) -> bool:
    """
    V_F lies in V_G up to equivalence of G

    F G^vee in Gamma_F settles it directly. Otherwise every container F' T^vee over Gamma_F
    is compared with G by invariants shared by G, G' and -G.
    """
    if f.alg.n != g.n:
        raise RankMismatch(f"Ranks {f.alg.n} and {g.n} differ")
    if fixes_pointwise(ImmutableMatrix(f.F * exact.dual_inverse(g.F)), f):
        return True

    group = group if group is not None else automorphism_group(f, max_order=max_order)
    target = types.invariant_key(g)
    seen = set()
    for G in containers(f, group):
        if tuple(G) in seen:
            continue
        seen.add(tuple(G))
        try:
            candidate = types.make_type(G)
            if candidate.order != g.order or exact.char_poly(candidate.R) != exact.char_poly(g.R):
                continue
            if types.invariant_key(candidate) == target:
                logger.debug(f"Container {list(G)} matches by invariants")
                return True
        except IsodualError as e:
            logger.debug(f"Container {list(G)} skipped: {e}")
    return False


def _candidates(A: np.ndarray, forms: Sequence[np.ndarray], max_vectors: int) -> List[List[np.ndarray]]:
    """For each basis slot i, the integer vectors v with v' M v = M_ii for every form M"""
    n = A.shape[0]
    pool = []
    for v, _ in density.vectors_up_to(A, float(np.max(np.diag(A))), max_vectors):
        v = np.array(v, dtype=float)
        pool.extend([v, -v])

    slots = []
    for i in range(n):
        slot = [
            v for v in pool
            if all(abs(v @ M @ v - M[i, i]) < MATCH_TOLERANCE * max(1.0, abs(M[i, i])) for M in forms)
        ]
        slots.append(slot)
    return slots


def automorphism_group(
    gt: GeoType,
    max_order: int = MAX_GROUP_ORDER,
    max_vectors: int = density.MAX_VECTORS,
) -> List[ImmutableMatrix]:
    """All integer T fixing the basepoint and its tangent space, canonically sorted"""
    A = gt.basepoint
    frame = geometry.tangent_frame(A, gt.F)
    forms = [A] + frame.basis
    slots = _candidates(A, forms, max_vectors)
    n = A.shape[0]
    logger.debug(f"Backtracking over {[len(s) for s in slots]} candidates per row")

    group: List[ImmutableMatrix] = []
    rows: List[np.ndarray] = []

    def compatible(v: np.ndarray, i: int) -> bool:
        for j, u in enumerate(rows):
            for M in forms:
                if abs(v @ M @ u - M[i, j]) > MATCH_TOLERANCE * max(1.0, abs(M[i, j])):
                    return False
        return True

    def extend(i: int) -> None:
        if i == n:
            group.append(ImmutableMatrix([[int(round(c)) for c in r] for r in rows]))
            if len(group) > max_order:
                raise SearchBudgetExceeded(f"Gamma_F has more than {max_order} elements")
            return
        for v in slots[i]:
            if compatible(v, i):
                rows.append(v)
                extend(i + 1)
                rows.pop()

    extend(0)

    F = gt.F
    moved = sum(1 for T in group if ImmutableMatrix(T * F * T.T) != F)
    if moved:
        logger.info(f"{moved} of {len(group)} elements of Gamma_F do not preserve F exactly")
    group.sort(key=lambda T: tuple(T))
    return group


def is_maximal_by_group(gt: GeoType, group: Optional[List[ImmutableMatrix]] = None) -> Optional[bool]:
    """Sufficient criteria: Gamma_F = {+-I}, or |Gamma_F| = 4 with F F^vee != +-I"""
    group = group if group is not None else automorphism_group(gt)
    if len(group) == 2:
        return True
    identity = sympy.eye(gt.alg.n)
    if len(group) == 4 and gt.alg.R != identity and gt.alg.R != -identity:
        return True
    return None
