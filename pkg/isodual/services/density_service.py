"""
Minima, minimal vectors, Hermite invariant and local-maximum certificates
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cholesky
from scipy.optimize import linprog

from ..models import Certificate, ConstantReport, GeoType, ShortVecResult
from ..utils import expressions
from ..utils.validators import (
    NumericalInstability,
    SearchBudgetExceeded,
    UnknownConstant,
    ValidationError,
)
from . import geometry_service as geometry

logger = logging.getLogger(__name__)

MIN_TOLERANCE = 1e-9
MAX_VECTORS = 200000
CONSTANT_TOLERANCE = 1e-9
EUTAXY_FLOOR = 1e-8
ASCENT_RADIUS = 0.05
ASCENT_STEPS = 600
ASCENT_SLACK = 0.5
ASCENT_ACTIVE = 1e-6
ASCENT_POLISH = 8


def _canonical(v: Tuple[int, ...]) -> Tuple[int, ...]:
    for c in v:
        if c:
            return v if c > 0 else tuple(-x for x in v)
    return v


def _cholesky(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError("Gram matrix must be square")
    if not np.allclose(A, A.T, atol=1e-10):
        raise ValidationError("Gram matrix must be symmetric")
    try:
        R = cholesky((A + A.T) / 2, lower=False)
    except LinAlgError:
        raise NumericalInstability("Gram matrix is not positive definite")
    if np.min(np.diag(R)) ** 2 < 1e-12:
        raise NumericalInstability("Cholesky pivot below 1e-12")
    return R


def vectors_up_to(
    A: np.ndarray, bound: float, max_vectors: int = MAX_VECTORS
) -> List[Tuple[Tuple[int, ...], float]]:
    """All nonzero v with A[v] <= bound, one per pair {v, -v}, by Fincke-Pohst enumeration"""
    R = _cholesky(A)
    n = R.shape[0]
    found: List[Tuple[Tuple[int, ...], float]] = []
    x = [0] * n

    def search(i: int, budget: float) -> None:
        center = -sum(R[i, j] * x[j] for j in range(i + 1, n)) / R[i, i]
        reach = np.sqrt(max(budget, 0.0)) / R[i, i]
        for value in range(int(np.ceil(center - reach - 1e-12)), int(np.floor(center + reach + 1e-12)) + 1):
            x[i] = value
            partial = R[i, i] * (value - center)
            remaining = budget - partial * partial
            if remaining < -1e-12 * max(1.0, bound):
                continue
            if i == 0:
                if any(x):
                    v = tuple(x)
                    if _canonical(v) == v:
                        norm = float(np.dot(v, A @ np.array(v, dtype=float)))
                        found.append((v, norm))
                        if len(found) > max_vectors:
                            raise SearchBudgetExceeded(
                                f"More than {max_vectors} vectors below {bound:.6g}"
                            )
            else:
                search(i - 1, remaining)
        x[i] = 0

    search(n - 1, bound + MIN_TOLERANCE * max(1.0, bound))
    return [(v, norm) for v, norm in found if norm <= bound + MIN_TOLERANCE * max(1.0, bound)]


def shortest_vectors(
    A: np.ndarray, tol: float = MIN_TOLERANCE, max_vectors: int = MAX_VECTORS
) -> ShortVecResult:
    """Minimum of A and its minimal vectors up to sign, sorted lexicographically"""
    A = np.asarray(A, dtype=float)
    candidates = vectors_up_to(A, float(np.min(np.diag(A))), max_vectors)
    if not candidates:
        raise NumericalInstability("Enumeration found no vector below the diagonal minimum")
    minimum = min(norm for _, norm in candidates)
    cutoff = minimum + tol * max(1.0, minimum)
    vectors = sorted(v for v, norm in candidates if norm <= cutoff)
    return ShortVecResult(min=minimum, vectors=vectors)


def brute_force_min(A: np.ndarray, bound: int = 3) -> ShortVecResult:
    """Exhaustive search over the box [-bound, bound]^n"""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    best, vectors = np.inf, []
    for v in itertools.product(range(-bound, bound + 1), repeat=n):
        if not any(v) or _canonical(v) != v:
            continue
        norm = float(np.dot(v, A @ np.array(v, dtype=float)))
        if norm < best - MIN_TOLERANCE:
            best, vectors = norm, [v]
        elif abs(norm - best) <= MIN_TOLERANCE * max(1.0, best):
            vectors.append(v)
    return ShortVecResult(min=best, vectors=sorted(vectors))


def hermite(A: np.ndarray) -> float:
    """min(A) / det(A)^(1/n)"""
    A = np.asarray(A, dtype=float)
    det = np.linalg.det(A)
    if det <= 0:
        raise NumericalInstability("Gram matrix has nonpositive determinant")
    return shortest_vectors(A).min / det ** (1.0 / A.shape[0])


def _frame_coordinates(frame, X: np.ndarray) -> np.ndarray:
    basis = np.column_stack([geometry.sym_coords(B) for B in frame.basis])
    coords, *_ = np.linalg.lstsq(basis, geometry.sym_coords(X), rcond=None)
    return coords


def is_eutactic(gradients, target: Optional[np.ndarray] = None, tol: float = 1e-10) -> bool:
    """
    Positive combination of the gradient columns reaching c * target with c > 0

    With no target, or a vanishing one, asks for sum lambda_u g_u = 0 with sum lambda_u = 1.
    """
    G = np.asarray(gradients, dtype=float)
    if G.ndim == 1:
        G = G.reshape(-1, 1)
    d, m = G.shape
    if m == 0:
        return False
    t = np.zeros(d) if target is None else np.asarray(target, dtype=float).reshape(-1)
    if np.linalg.norm(t) <= tol:
        A_eq = np.vstack([G, np.ones((1, m))])
        bounds = [(EUTAXY_FLOOR, None)] * m
    else:
        A_eq = np.vstack([np.column_stack([G, -t]), np.ones((1, m + 1))])
        bounds = [(EUTAXY_FLOOR, None)] * (m + 1)
    b_eq = np.concatenate([np.zeros(d), [1.0]])
    result = linprog(
        c=np.zeros(A_eq.shape[1]), A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs"
    )
    return result.status == 0


def certify_local_max(gt: GeoType, A: Optional[np.ndarray] = None, tol: float = 1e-8) -> Certificate:
    """Relative perfection and eutaxy of A on V_F"""
    A = gt.basepoint if A is None else np.asarray(A, dtype=float)
    frame = geometry.tangent_frame(A, gt.F)
    short = shortest_vectors(A)
    gradients = [geometry.length_gradient(A, gt.F, v, frame) for v in short.vectors]

    if frame.dimension == 0:
        return Certificate(
            point=A, min=short.min, pairs=short.pairs, dimension=0, rank=0,
            perfect_rel=True, eutactic_rel=True,
        )

    G = np.column_stack([_frame_coordinates(frame, X) for X in gradients])
    singular = np.linalg.svd(G, compute_uv=False)
    rank = int(np.sum(singular > tol * max(1.0, singular[0])))
    perfect = rank == frame.dimension
    eutactic = is_eutactic(G)
    logger.debug(
        f"Certificate: dim {frame.dimension}, {short.pairs} pairs, rank {rank}, eutactic {eutactic}"
    )
    return Certificate(
        point=A, min=short.min, pairs=short.pairs, dimension=frame.dimension,
        rank=rank, perfect_rel=perfect, eutactic_rel=eutactic,
    )


def _linear_model(A: np.ndarray, basis: List[np.ndarray], bound: float) -> Tuple[np.ndarray, np.ndarray]:
    vectors = [np.array(v, dtype=float) for v, _ in vectors_up_to(A, bound)]
    values = np.array([v @ A @ v for v in vectors])
    slopes = np.array([[v @ X @ v for X in basis] for v in vectors])
    return values, slopes


def _combine(h: np.ndarray, basis: List[np.ndarray]) -> np.ndarray:
    return sum(c * X for c, X in zip(h, basis))


def _polish(A: np.ndarray, F, current: float, iterations: int = ASCENT_POLISH) -> Tuple[np.ndarray, float]:
    """Newton iterations equalizing the lengths of the nearly minimal vectors"""
    for _ in range(iterations):
        frame = geometry.tangent_frame(A, F)
        if frame.dimension == 0:
            break
        values, slopes = _linear_model(A, frame.basis, current * (1 + ASCENT_ACTIVE))
        system = np.column_stack([slopes, -np.ones(len(values))])
        solution, *_ = np.linalg.lstsq(system, -values, rcond=None)
        h = solution[:-1]
        if np.linalg.norm(h) < 1e-15:
            break
        B = geometry.geodesic(A, _combine(h, frame.basis), 1.0)
        value = shortest_vectors(B).min
        if value < current - 1e-13 * max(1.0, current):
            break
        A, current = B, value
    return A, current


def ascend_local_max(
    A: np.ndarray,
    F,
    radius: float = ASCENT_RADIUS,
    max_steps: int = ASCENT_STEPS,
    tol: float = 1e-13,
) -> np.ndarray:
    """
    Climb the minimum along V_F starting from A

    Each step maximizes the linearized minimum over a box of tangent coordinates
    and moves along the geodesic; the box grows on success and halves on failure.
    The final point is polished so its nearly minimal vectors have equal length.
    """
    A = np.asarray(A, dtype=float)
    current = shortest_vectors(A).min
    ceiling = radius
    for step in range(max_steps):
        if radius < tol:
            break
        frame = geometry.tangent_frame(A, F)
        if frame.dimension == 0:
            return A
        d = frame.dimension
        values, slopes = _linear_model(A, frame.basis, current * (1 + ASCENT_SLACK))
        # maximize t subject to values + slopes h >= t and |h_j| <= radius
        result = linprog(
            c=np.concatenate([np.zeros(d), [-1.0]]),
            A_ub=np.column_stack([-slopes, np.ones(len(values))]),
            b_ub=values,
            bounds=[(-radius, radius)] * d + [(None, None)],
            method="highs",
        )
        if result.status != 0:
            raise NumericalInstability(f"Ascent LP failed: {result.message}")
        if result.x[d] <= current * (1 + 1e-15):
            radius /= 2
            continue
        B = geometry.geodesic(A, _combine(result.x[:d], frame.basis), 1.0)
        value = shortest_vectors(B).min
        if value > current:
            A, current = B, value
            radius = min(2 * radius, ceiling)
        else:
            radius /= 2
    logger.debug(f"Ascent stopped after {step + 1} steps at min {current!r}")
    A, current = _polish(A, F, current)
    return A


@dataclass(frozen=True)
class ConstantSpec:
    closed_form: str
    witness: Optional[str]
    pairs: Optional[int] = None
    reason: Optional[str] = None
    # closed form the constant equals exactly, for witnesses shared with it
    equal_to: Optional[str] = None


CONSTANTS: Dict[str, ConstantSpec] = {
    "alpha": ConstantSpec("alpha", "Lambda_3"),
    "beta": ConstantSpec("beta", "Lambda4p"),
    "one_over_gamma": ConstantSpec("1/gam", "Lambda5p"),
    "delta": ConstantSpec("delta", "W_6"),
    "nu": ConstantSpec(
        "nu", "Lambda5p", equal_to="1/gam",
        reason="no rank-7 point is printed; the rank-5 witness of 1/gam attains the same value",
    ),
    "phi": ConstantSpec("phi", "KG_phi", pairs=10),
    "psi": ConstantSpec("psi", "A_psi", pairs=16),
    "omega": ConstantSpec("omega", "Lambda7p", pairs=8),
    "seven_fifths": ConstantSpec("7/5", "Lambda_5"),
    "four_thirds": ConstantSpec("4/3", "Lambda_4"),
    "five_thirds": ConstantSpec("5/3", "Lambda_7"),
    "sqrt2": ConstantSpec("sqrt(2)", "D_4"),
    "two_over_sqrt3": ConstantSpec("2/sqrt(3)", "A_2", pairs=3),
    "epsilon": ConstantSpec("epsilon", None, reason="only a lower bound on G_6 is printed, with no form"),
    "zeta": ConstantSpec("zeta", None, reason="the G_3H_3 parametrization is printed with incomplete rows"),
    "eta": ConstantSpec("eta", None, reason="only a lower bound on H_6 is printed, with no form"),
    "three_halves": ConstantSpec("3/2", None, reason="the maximum on I_{5,1} is stated without a form"),
}


def verify_constant(
    name: str, witness_lookup: Callable[[str], np.ndarray], tol: float = CONSTANT_TOLERANCE
) -> ConstantReport:
    """Compare the minimum of the registered witness with the closed form"""
    if name not in CONSTANTS:
        raise UnknownConstant(f"Unknown constant: {name}")
    spec = CONSTANTS[name]
    expected = expressions.evaluate(spec.closed_form)

    if spec.witness is None:
        return ConstantReport(
            name=name, closed_form=spec.closed_form, expected=expected, computed=None,
            pairs_expected=spec.pairs, pairs_found=None, status="SKIPPED", reason=spec.reason,
        )

    A = witness_lookup(spec.witness)
    short = shortest_vectors(A)
    computed = short.min / np.linalg.det(A) ** (1.0 / A.shape[0])
    ok = abs(computed - expected) < tol
    if spec.pairs is not None:
        ok = ok and short.pairs == spec.pairs
    if spec.equal_to is not None and not expressions.same_number(spec.closed_form, spec.equal_to):
        logger.warning(f"Constant {name} is not exactly {spec.equal_to}")
        ok = False
    if not ok:
        logger.warning(f"Constant {name}: computed {computed!r}, expected {expected!r}")
    return ConstantReport(
        name=name,
        closed_form=spec.closed_form,
        expected=expected,
        computed=float(computed),
        pairs_expected=spec.pairs,
        pairs_found=short.pairs,
        status="PASS" if ok else "FAIL",
        witness=spec.witness,
        reason=spec.reason,
    )
