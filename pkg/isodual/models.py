"""
Domain models
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import sympy


@dataclass(frozen=True)
class AlgType:
    """An isodual type F with R = F F^vee of finite order"""

    F: sympy.ImmutableMatrix
    R: sympy.ImmutableMatrix
    order: int
    name: Optional[str] = None

    @property
    def n(self) -> int:
        return self.F.rows

    @property
    def principal(self) -> bool:
        """Order is a power of 2"""
        return self.order & (self.order - 1) == 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "F": {"n": self.n, "rows": [[int(v) for v in row] for row in self.F.tolist()]},
            "order": self.order,
            "principal": self.principal,
        }


@dataclass(frozen=True)
class Component:
    """Eigen-component M_k = ker Phi_k(R^vee) with its restricted form"""

    k: int
    basis: sympy.ImmutableMatrix  # columns span M_k
    block: sympy.ImmutableMatrix  # B' F B

    def to_dict(self) -> Dict[str, Any]:
        return {"k": self.k, "basis": self.basis.T.tolist(), "block": self.block.tolist()}


@dataclass(frozen=True)
class Decomposition:
    components: Tuple[Component, ...]
    index: int

    def component(self, k: int) -> Optional[Component]:
        for comp in self.components:
            if comp.k == k:
                return comp
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {"index": self.index, "components": [c.to_dict() for c in self.components]}


@dataclass(frozen=True)
class RealSignature:
    """(p, q; g; {(k, l): (p_kl, q_kl)})"""

    p: int = 0
    q: int = 0
    g: int = 0
    herm: Tuple[Tuple[Tuple[int, int], Tuple[int, int]], ...] = ()

    @property
    def rank(self) -> int:
        return self.p + self.q + 2 * self.g + sum(2 * (a + b) for _, (a, b) in self.herm)

    def herm_dict(self) -> Dict[Tuple[int, int], Tuple[int, int]]:
        return dict(self.herm)

    def negated(self) -> "RealSignature":
        return RealSignature(
            self.q, self.p, self.g, tuple((kl, (b, a)) for kl, (a, b) in self.herm)
        )

    def __add__(self, other: "RealSignature") -> "RealSignature":
        herm = dict(self.herm)
        for kl, (a, b) in other.herm:
            old = herm.get(kl, (0, 0))
            herm[kl] = (old[0] + a, old[1] + b)
        return RealSignature(
            self.p + other.p, self.q + other.q, self.g + other.g, tuple(sorted(herm.items()))
        )

    def normalized(self) -> "RealSignature":
        """Representative of {s, -s} used when the global sign is irrelevant"""
        return min(self, self.negated(), key=lambda s: s.sort_key())

    def sort_key(self) -> tuple:
        return (self.p, self.q, self.g, self.herm)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p": self.p,
            "q": self.q,
            "g": self.g,
            "herm": [{"k": k, "l": l, "p": a, "q": b} for (k, l), (a, b) in self.herm],
        }

    def __str__(self) -> str:
        parts = []
        if self.p or self.q:
            parts.append(f"I_{{{self.p},{self.q}}}")
        if self.g:
            parts.append(f"J_2^{self.g}")
        for (k, l), (a, b) in self.herm:
            if a:
                parts.append(f"P({k},{l})^{a}")
            if b:
                parts.append(f"P({k},{l})^-{b}")
        return " ".join(parts) or "0"


@dataclass(frozen=True)
class BlockSpec:
    """Canonical block: SYM(p,q), SYMII(m), ALT(g) or HERM(k,l,signs)"""

    kind: str
    p: int = 0
    q: int = 0
    g: int = 0
    k: int = 0
    l: int = 0
    signs: Tuple[int, ...] = ()

    @property
    def size(self) -> int:
        if self.kind == "SYM":
            return self.p + self.q
        if self.kind == "SYMII":
            return 2 * self.g
        if self.kind == "ALT":
            return 2 * self.g
        return 2 * len(self.signs)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "p": self.p,
            "q": self.q,
            "g": self.g,
            "k": self.k,
            "l": self.l,
            "signs": list(self.signs),
        }


@dataclass
class RealSplit:
    P: np.ndarray
    blocks: List[BlockSpec]
    F0: np.ndarray
    residual: float = 0.0
    source: str = "computed"


@dataclass
class Gram:
    """Gram matrix with optional radical expressions behind its entries"""

    values: np.ndarray
    exprs: Optional[List[List[str]]] = None
    name: Optional[str] = None

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def to_dict(self) -> Dict[str, Any]:
        rows = []
        for i in range(self.n):
            row = []
            for j in range(self.n):
                expr = self.exprs[i][j] if self.exprs else repr(float(self.values[i, j]))
                row.append({"expr": expr, "val": float(self.values[i, j])})
            rows.append(row)
        return {"name": self.name, "n": self.n, "rows": rows}


@dataclass
class GeoType:
    """V_F with a basepoint and a way to reach every canonical block"""

    alg: AlgType
    split: RealSplit
    basepoint: np.ndarray
    signature: RealSignature

    @property
    def F(self) -> sympy.ImmutableMatrix:
        return self.alg.F

    @property
    def dimension(self) -> int:
        from .services.realtype_service import dimension

        return dimension(self.signature)


@dataclass
class TangentFrame:
    at: np.ndarray
    basis: List[np.ndarray]
    annihilator: np.ndarray  # coefficients of f, highest degree first
    operator: np.ndarray = field(repr=False, default=None)

    @property
    def dimension(self) -> int:
        return len(self.basis)


@dataclass
class ShortVecResult:
    min: float
    vectors: List[Tuple[int, ...]]

    @property
    def pairs(self) -> int:
        return len(self.vectors)

    def to_dict(self) -> Dict[str, Any]:
        return {"min": self.min, "pairs": self.pairs, "vectors": [list(v) for v in self.vectors]}


@dataclass
class Certificate:
    point: np.ndarray
    min: float
    pairs: int
    dimension: int
    rank: int
    perfect_rel: bool
    eutactic_rel: bool

    @property
    def is_local_max(self) -> bool:
        return self.perfect_rel and self.eutactic_rel

    def to_dict(self) -> Dict[str, Any]:
        return {
            "min": self.min,
            "pairs": self.pairs,
            "dimension": self.dimension,
            "rank": self.rank,
            "perfect": self.perfect_rel,
            "eutactic": self.eutactic_rel,
            "local_max": self.is_local_max,
        }


@dataclass
class ConstantReport:
    name: str
    closed_form: str
    expected: float
    computed: Optional[float]
    pairs_expected: Optional[int]
    pairs_found: Optional[int]
    status: str
    witness: Optional[str] = None
    reason: Optional[str] = None

    @property
    def delta(self) -> Optional[float]:
        if self.computed is None:
            return None
        return abs(self.computed - self.expected)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "closed_form": self.closed_form,
            "expected": self.expected,
            "computed": self.computed,
            "delta": self.delta,
            "pairs_expected": self.pairs_expected,
            "pairs_found": self.pairs_found,
            "status": self.status,
            "witness": self.witness,
            "reason": self.reason,
        }

    def render(self) -> str:
        computed = "-" if self.computed is None else f"{self.computed:.12f}"
        delta = "-" if self.delta is None else f"{self.delta:.2e}"
        pairs = f"{self.pairs_found if self.pairs_found is not None else '-'}"
        expected_pairs = f"{self.pairs_expected if self.pairs_expected is not None else '-'}"
        line = (
            f"{self.name}  {self.closed_form}  computed={computed}  |d|={delta}  "
            f"pairs={pairs}/{expected_pairs}  {self.status}"
        )
        if self.reason:
            line += f"  ({self.reason})"
        return line


@dataclass
class CatalogEntry:
    name: str
    kind: str
    value: Any
    provenance: str = ""
    notes: List[str] = field(default_factory=list)


@dataclass
class RowReport:
    row_id: str
    name: str
    status: str
    checks: Dict[str, str] = field(default_factory=dict)
    reason: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "row": self.row_id,
            "name": self.name,
            "status": self.status,
            "checks": dict(self.checks),
            "reason": self.reason,
        }


@dataclass
class TableReport:
    table: str
    rows: List[RowReport] = field(default_factory=list)

    def counts(self) -> Dict[str, int]:
        tally = {"PASS": 0, "FAIL": 0, "SKIPPED": 0}
        for row in self.rows:
            tally[row.status] = tally.get(row.status, 0) + 1
        return tally

    @property
    def ok(self) -> bool:
        return all(row.status != "FAIL" for row in self.rows)

    def to_dict(self) -> Dict[str, Any]:
        return {"table": self.table, "rows": [r.to_dict() for r in self.rows], **self.counts()}
