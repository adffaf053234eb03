"""
Re-derives the reference tables from the catalog and reports PASS, FAIL or SKIPPED per row
"""

import itertools
import logging
from typing import Any, Callable, Dict, List, Optional, Set, Tuple

import numpy as np
import sympy
from sympy import ImmutableMatrix

from ..models import AlgType, GeoType, RealSignature, RowReport, TableReport
from ..utils import expressions
from ..utils.validators import IsodualError, NotFound, SearchBudgetExceeded, SplitFailed
from . import automorphism_service as automorphisms
from . import density_service as density
from . import exact_service as exact
from . import geometry_service as geometry
from . import realtype_service as realtypes
from . import type_service as types
from .catalog_service import (
    TYPE_LETTERS,
    CatalogService,
    expand_template,
    negate_name,
    parse_name,
    parse_range,
)

logger = logging.getLogger(__name__)

PASS = "PASS"
FAIL = "FAIL"
SKIPPED = "SKIPPED"
UNSEPARATED = "UNSEPARATED"

ALGEBRAIC_TABLES = ("2", "3", "4", "5", "6", "7")
GEOMETRIC_TABLES = ("8", "9", "10", "11", "13")
INCLUSION_TABLES = ("12", "14")
TORSION_TABLES = ("15", "16")
EXTRA_TABLES = ("identities", "constants")
ALL_TABLES = ALGEBRAIC_TABLES + GEOMETRIC_TABLES + INCLUSION_TABLES + TORSION_TABLES + EXTRA_TABLES

MAXIMALITY_BUDGET = 4
HERMITE_TOLERANCE = 1e-9

RELATION_WITNESS = ImmutableMatrix(
    [[1, 2, -1, 1], [1, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]
)
KLEIN_SAMPLE = [[0.1, 0.2, 0.0], [0.0, 0.1, 0.3], [0.2, 0.0, 0.1]]


def passed(detail: str = "") -> str:
    return f"{PASS}: {detail}" if detail else PASS


def failed(detail: str) -> str:
    return f"{FAIL}: {detail}"


def skipped(detail: str) -> str:
    return f"{SKIPPED}: {detail}"


def compare(label: str, computed: Any, expected: Any) -> str:
    if computed == expected:
        return passed(f"{label} {computed}")
    return failed(f"{label} {computed}, expected {expected}")


def row_status(checks: Dict[str, str]) -> str:
    values = list(checks.values())
    if any(v.startswith(FAIL) for v in values):
        return FAIL
    if any(v.startswith(UNSEPARATED) for v in values):
        return UNSEPARATED
    if any(v.startswith(PASS) for v in values):
        return PASS
    return SKIPPED


def close_to(value: float, expected: float, tol: float = HERMITE_TOLERANCE) -> bool:
    return abs(value - expected) <= tol * max(1.0, abs(expected))


def _identity_name(p: int, q: int) -> str:
    if p and q:
        return f"I_{{{p},{q}}}"
    if p:
        return f"I_{p}"
    return f"I_{q}^-" if q else ""


def family_candidates(n: int, parts: List[str], sizes: Dict[str, int]) -> List[str]:
    """Every I_{p,q} R_2^r followed by a multiset of parts, of total size n"""
    names = []
    for count in range(n // 2 + 1):
        for chosen in itertools.combinations_with_replacement(parts, count):
            used = sum(sizes[part] for part in chosen)
            if used > n:
                continue
            rest = n - used
            for r in range(rest // 2 + 1):
                free = rest - 2 * r
                for p in range(free + 1):
                    prefix = _identity_name(p, free - p) + "R_2" * r
                    names.append(prefix + "".join(chosen))
    return [name for name in names if name]


class VerificationService:
    """Checks the tables against what the library computes"""

    def __init__(self, catalog: CatalogService, config: Optional[Dict[str, Any]] = None):
        self.catalog = catalog
        self.config = config or {}
        self.tolerance = float(self.config.get("TOLERANCE", 1e-9))
        self.max_group_order = int(self.config.get("MAX_GROUP_ORDER", automorphisms.MAX_GROUP_ORDER))
        self.max_inclusion_scan = int(self.config.get("MAX_INCLUSION_SCAN", 2000))
        self._groups: Dict[str, Any] = {}
        self._keys: Dict[tuple, Optional[tuple]] = {}
        self._peer_keys: Dict[str, Tuple[Set[tuple], bool]] = {}

    # Entry points

    def verify_table(self, table_id: str) -> TableReport:
        table_id = str(table_id)
        logger.info(f"Verifying table {table_id}")
        if table_id in ALGEBRAIC_TABLES:
            report = self._verify_algebraic(table_id)
        elif table_id in GEOMETRIC_TABLES:
            report = self._verify_geometric(table_id)
        elif table_id in INCLUSION_TABLES:
            report = self._verify_inclusions(table_id)
        elif table_id in TORSION_TABLES:
            report = self._verify_torsion(table_id)
        elif table_id == "identities":
            report = self._verify_identities()
        elif table_id == "constants":
            report = self._verify_constants()
        else:
            raise NotFound(f"Unknown table {table_id}; known: {', '.join(ALL_TABLES)}")
        counts = report.counts()
        logger.info(
            f"Table {table_id}: {counts['PASS']} passed, {counts['FAIL']} failed, {counts['SKIPPED']} skipped"
        )
        return report

    def verify_all(self) -> List[TableReport]:
        return [self.verify_table(table_id) for table_id in ALL_TABLES]

    # Row plumbing

    def _row(self, row_id: str, name: str, checks: Dict[str, str],
             suspect: Optional[Dict[str, str]] = None, reason: Optional[str] = None) -> RowReport:
        """Only the checks named by a suspect flag are downgraded; every other FAIL stands"""
        for key, why in (suspect or {}).items():
            value = checks.get(key, "")
            if value.startswith(FAIL):
                logger.warning(f"Row {row_id} ({name}) fails {key} on data flagged as suspect: {why}")
                checks[key] = skipped(f"suspect-data, {why} ({value[len(FAIL) + 2:]})")
        return RowReport(row_id=row_id, name=name, status=row_status(checks), checks=checks, reason=reason)

    @staticmethod
    def _guard(checks: Dict[str, str], key: str, action: Callable[[], str]) -> None:
        try:
            checks[key] = action()
        except SearchBudgetExceeded as e:
            checks[key] = skipped(str(e))
        except (IsodualError, ArithmeticError, np.linalg.LinAlgError, ValueError) as e:
            logger.error(f"Check {key} raised {type(e).__name__}: {e}")
            checks[key] = failed(f"{type(e).__name__}: {e}")

    # Algebraic tables

    def _verify_algebraic(self, table_id: str) -> TableReport:
        table = self.catalog.algebraic_table(table_id)
        report = TableReport(table=table_id)
        per_rank: Dict[int, List[AlgType]] = {}
        seen: Dict[ImmutableMatrix, str] = {}
        letters: Set[str] = set()

        for group in table["groups"]:
            n, d = group["n"], group["d"]
            for template in group["types"]:
                for name in expand_template(template):
                    checks: Dict[str, str] = {}
                    try:
                        a = self.catalog.type_from_name(name)
                    except IsodualError as e:
                        checks["type"] = failed(f"{type(e).__name__}: {e}")
                        report.rows.append(self._row(f"{n}/{d}", name, checks, self.catalog.suspect_checks(name)))
                        continue

                    checks["rank"] = compare("rank", a.n, n)
                    checks["order"] = compare("order", a.order, d)
                    self._guard(checks, "torsion", lambda: self._torsion_check(a, group["torsion"]))
                    self._guard(checks, "additivity", lambda: self._additivity_check(a, name))
                    if a.F in seen:
                        checks["distinct"] = failed(f"same matrix as {seen[a.F]}")
                    else:
                        seen[a.F] = name
                    per_rank.setdefault(n, []).append(a)
                    letters.update(t.key for t in parse_name(name) if t.letter in TYPE_LETTERS)
                    report.rows.append(self._row(f"{n}/{d}", name, checks, self.catalog.suspect_checks(name)))

        for key in sorted(letters):
            checks = {}
            self._guard(checks, "real_type", lambda: self._real_type_check(key))
            report.rows.append(self._row(f"real_type/{key}", key, checks, self.catalog.suspect_checks(key)))

        for n, totals in sorted(table["totals"].items(), key=lambda item: int(item[0])):
            listed = per_rank.get(int(n), [])
            checks = {
                "types": compare("types", len(listed), totals["types"]),
                "principal": compare("principal", sum(1 for a in listed if a.principal), totals["principal"]),
            }
            report.rows.append(self._row(f"totals/{n}", f"rank {n}", checks))
        return report

    def _torsion_check(self, a: AlgType, torsion: str) -> str:
        R = self.catalog.build_matrix(torsion)
        if a.R == R:
            return passed("exact")
        if exact.char_poly(a.R) == exact.char_poly(R):
            return passed("char poly")
        return failed(f"chi(R) differs from chi({torsion})")

    def _additivity_check(self, a: AlgType, name: str) -> str:
        parts = self.catalog.components(name)
        if len(parts) == 1:
            return skipped("single block")
        total = RealSignature()
        for token, matrix in parts:
            total = total + realtypes.signature(types.make_type(matrix, token))
        computed = realtypes.signature(a)
        if computed == total:
            return passed(str(computed))
        return failed(f"{computed} differs from the blockwise sum {total}")

    def _real_type_check(self, key: str) -> str:
        computed = realtypes.signature(self.catalog.type_from_name(key)).normalized()
        declared = self.catalog.declared_real_type(key).normalized()
        return compare("real type", str(computed), str(declared))

    # Torsion tables

    def _cell_classes(self, table: Dict[str, Any], cell: Dict[str, Any]) -> List[str]:
        if not cell.get("negated"):
            return list(cell.get("classes", []))
        for other in table["cells"]:
            if other["n"] == cell["n"] and other["d"] == cell["d"] and other["det"] == -cell["det"]:
                return [negate_name(name) for name in other.get("classes", [])]
        return []

    def _verify_torsion(self, table_id: str) -> TableReport:
        table = self.catalog.torsion_table(table_id)
        report = TableReport(table=table_id)
        counted: Dict[Tuple[int, int], int] = {}

        for cell in table["cells"]:
            n, d, det = cell["n"], cell["d"], cell["det"]
            classes = self._cell_classes(table, cell)
            counted[(n, d)] = counted.get((n, d), 0) + len(classes)
            for name in classes:
                checks: Dict[str, str] = {}
                try:
                    M = self.catalog.build_matrix(name)
                except IsodualError as e:
                    checks["matrix"] = failed(str(e))
                    report.rows.append(self._row(f"{n}/{d}/{det:+d}", name, checks))
                    continue
                checks["size"] = compare("size", M.rows, n)
                self._guard(checks, "order", lambda: compare("order", exact.finite_order(M), d))
                checks["det"] = compare("det", exact.det(M), det)
                report.rows.append(self._row(f"{n}/{d}/{det:+d}", name, checks))

        for n, by_order in sorted(table["counts"].items(), key=lambda item: int(item[0])):
            for d, expected in sorted(by_order.items(), key=lambda item: int(item[0])):
                checks = {"count": compare("classes", counted.get((int(n), int(d)), 0), expected)}
                if d == "2" and int(n) <= 4:
                    formula = int(n) ** 2 // 4 + int(n)
                    checks["formula"] = compare("[n^2/4] + n", formula, expected)
                report.rows.append(self._row(f"count/{n}/{d}", f"rank {n}, order {d}", checks))

        if table_id == "16":
            for family in self.catalog.torsion["families"]:
                report.rows.extend(self._verify_family(family))
        return report

    def _verify_family(self, family: Dict[str, Any]) -> List[RowReport]:
        d = family["d"]
        sizes = {part: self.catalog.build_matrix(part).rows for part in family["parts"]}
        rows = []
        for n in family["ranks"]:
            kept = [
                name for name in family_candidates(n, family["parts"], sizes)
                if exact.finite_order(self.catalog.build_matrix(name)) == d
            ]
            checks = {"count": compare("classes", len(kept), family["counts"][str(n)])}
            rows.append(self._row(f"family/{n}/{d}", f"rank {n}, order {d}", checks))
        return rows

    # Groups and containers

    def group(self, name: str, budget: int) -> Optional[List[ImmutableMatrix]]:
        """Gamma_F for the named type, or None when it has more than budget elements"""
        cached = self._groups.get(name)
        if isinstance(cached, list):
            return cached if len(cached) <= budget else None
        if isinstance(cached, int) and cached >= budget:
            return None
        try:
            group = automorphisms.automorphism_group(self.catalog.geotype_for(name), max_order=budget)
        except SearchBudgetExceeded:
            self._groups[name] = budget
            return None
        self._groups[name] = group
        return group

    def _key(self, G) -> Optional[tuple]:
        """Invariant key of an isodual matrix, None when it is not isodual or not principal"""
        cache_key = tuple(G)
        if cache_key not in self._keys:
            try:
                a = types.make_type(G)
            except IsodualError:
                self._keys[cache_key] = None
            else:
                self._keys[cache_key] = types.invariant_key(a) if a.principal or a.n < 5 else None
        return self._keys[cache_key]

    def _peer_key_set(self, name: str) -> Tuple[Set[tuple], bool]:
        """Keys of every algebraic type with the same Gram variety as name; the flag is completeness"""
        if name in self._peer_keys:
            return self._peer_keys[name]
        gt = self.catalog.geotype_for(name)
        group = self.group(name, self.max_inclusion_scan)
        if group is None:
            result = ({types.invariant_key(gt.alg)}, False)
        else:
            keys = set()
            for G in automorphisms.containers(gt, group):
                key = self._key(G)
                if key is not None and realtypes.dimension(realtypes.signature(types.make_type(G))) == gt.dimension:
                    keys.add(key)
            result = (keys, True)
        self._peer_keys[name] = result
        return result

    def computed_containers(self, name: str, peers: Dict[int, str]) -> Tuple[Optional[Set[int]], str]:
        """Rows whose varieties contain V_F; 0 stands for a non-principal container"""
        gt = self.catalog.geotype_for(name)
        group = self.group(name, self.max_inclusion_scan)
        if group is None:
            return None, skipped("|Gamma_F| exceeds inclusion budget")

        peer_sets = {row: self._peer_key_set(peer) for row, peer in peers.items()}
        found: Set[int] = set()
        for G in automorphisms.containers(gt, group):
            key = self._key(G)
            if key is None:
                found.add(0)
                continue
            matches = [row for row, (keys, _) in peer_sets.items() if key in keys]
            if len(matches) > 1:
                return None, skipped(f"container matches rows {matches}")
            if not matches:
                if any(not complete for _, complete in peer_sets.values()):
                    return None, skipped("container not matched and some peer groups are incomplete")
                return None, failed("container matches no row")
            found.add(matches[0])
        return found, passed()

    # Geometric tables

    def _declared_containers(self, table_id: str, table: Dict[str, Any], row: Dict[str, Any]) -> Optional[Set[int]]:
        if table["inclusions"]:
            text = row.get("containers")
        else:
            text = self.catalog.inclusion_table(table["containers_table"])["containers"].get(str(row["row"]))
        if text is None:
            return None
        return {row["row"]} if text == "max" else parse_range(text)

    def _declared_maximal(self, table: Dict[str, Any], row: Dict[str, Any]) -> bool:
        if table["inclusions"]:
            return row.get("containers") == "max"
        return bool(row.get("maximal", False))

    def _verify_geometric(self, table_id: str) -> TableReport:
        table = self.catalog.geometric_table(table_id)
        report = TableReport(table=table_id)
        by_row = {(r["n"], r["row"]): r for r in table["rows"]}

        for row in table["rows"]:
            name = row["name"]
            suspect = self.catalog.suspect_checks(name, row)
            checks: Dict[str, str] = {}
            try:
                gt = self.catalog.geotype_for(name)
            except IsodualError as e:
                checks["type"] = failed(f"{type(e).__name__}: {e}")
                report.rows.append(self._row(f"{row['n']}.{row['row']}", name, checks, suspect))
                continue

            checks["dim"] = compare("dim", gt.dimension, row["dim"])
            if "gamma" in row:
                self._guard(checks, "gamma", lambda: self._gamma_check(name, row["gamma"]))
            self._guard(checks, "mu", lambda: self._mu_check(table_id, table, by_row, row, gt))
            if table["inclusions"]:
                peers = {r["row"]: r["name"] for r in table["rows"] if r["n"] == row["n"]}
                self._guard(checks, "containers", lambda: self._containers_check(table_id, table, row, peers))
            self._guard(checks, "maximal", lambda: self._maximal_check(table, row, gt))
            report.rows.append(self._row(f"{row['n']}.{row['row']}", name, checks, suspect, row.get("skip")))

        maximal_counts = self.catalog.maximal_counts()
        for n, totals in sorted(table["totals"].items(), key=lambda item: int(item[0])):
            rows = [r for r in table["rows"] if r["n"] == int(n)]
            declared = sum(1 for r in rows if self._declared_maximal(table, r))
            checks = {
                "rows": compare("rows", len(rows), totals["rows"]),
                "maximal": compare("maximal", declared, totals["maximal"]),
                "maximal_counts": compare("maximal", declared, maximal_counts.get(int(n))),
            }
            report.rows.append(self._row(f"totals/{n}", f"rank {n}", checks))
        return report

    def _gamma_check(self, name: str, expected: int) -> str:
        group = self.group(name, self.max_group_order)
        if group is None:
            return skipped(f"|Gamma_F| exceeds {self.max_group_order}")
        return compare("|Gamma_F|", len(group), expected)

    def _hermite_check(self, value: float, mu: str, label: str) -> str:
        expected = expressions.evaluate(mu)
        if close_to(value, expected):
            return passed(f"{label} {value:.12f}")
        return failed(f"{label} {value:.12f}, expected {mu} = {expected:.12f}")

    def _mu_check(self, table_id: str, table: Dict[str, Any], by_row: Dict, row: Dict[str, Any], gt: GeoType) -> str:
        mu = row["mu"]
        if row["dim"] == 0:
            return self._hermite_check(density.hermite(gt.basepoint), mu, "basepoint")

        witness = row.get("witness")
        if witness and "gram" in witness:
            A = self.catalog.witness_gram(witness["gram"])
            if not geometry.membership(A, gt.F, tol=max(self.tolerance, 1e-8)):
                return failed(f"{witness['gram']} is not in V_F")
            return self._hermite_check(density.hermite(A), mu, witness["gram"])

        if witness and "row" in witness:
            source = by_row.get((row["n"], witness["row"]))
            if source is None:
                return failed(f"witness row {witness['row']} missing")
            containers = self._declared_containers(table_id, table, source) or set()
            if row["row"] not in containers:
                return failed(f"row {witness['row']} is not listed inside row {row['row']}")
            basepoint = self.catalog.geotype_for(source["name"]).basepoint
            return self._hermite_check(density.hermite(basepoint), mu, f"row {witness['row']}")

        return skipped(row.get("skip", "no witness"))

    def _containers_check(self, table_id: str, table: Dict[str, Any], row: Dict[str, Any], peers: Dict[int, str]) -> str:
        declared = self._declared_containers(table_id, table, row)
        computed, status = self.computed_containers(row["name"], peers)
        if computed is None:
            return status
        return compare("containers", sorted(computed), sorted(declared))

    def _maximal_check(self, table: Dict[str, Any], row: Dict[str, Any], gt: GeoType) -> str:
        group = self.group(row["name"], MAXIMALITY_BUDGET)
        if group is None:
            return skipped(f"|Gamma_F| above {MAXIMALITY_BUDGET}")
        verdict = automorphisms.is_maximal_by_group(gt, group)
        if verdict is None:
            return skipped("criterion inconclusive")
        return compare("maximal", verdict, self._declared_maximal(table, row))

    # Inclusion tables

    def _verify_inclusions(self, table_id: str) -> TableReport:
        inclusions = self.catalog.inclusion_table(table_id)
        table = self.catalog.geometric_table(inclusions["of"])
        report = TableReport(table=table_id)
        peers = {r["row"]: r["name"] for r in table["rows"]}
        maximal = 0

        for row in table["rows"]:
            name = row["name"]
            text = inclusions["containers"].get(str(row["row"]))
            checks: Dict[str, str] = {}
            if text is None:
                checks["containers"] = failed("no containers listed")
                report.rows.append(self._row(str(row["row"]), name, checks))
                continue
            declared = parse_range(text)
            is_maximal = declared == {row["row"]}
            maximal += is_maximal
            checks["flag"] = compare("maximal", is_maximal, bool(row.get("maximal", False)))
            self._guard(checks, "containers", lambda: self._compare_inclusions(name, declared, peers))
            report.rows.append(self._row(str(row["row"]), name, checks, self.catalog.suspect_checks(name, row)))

        n = table["rows"][0]["n"]
        checks = {"maximal": compare("maximal", maximal, self.catalog.maximal_counts().get(n))}
        report.rows.append(self._row(f"totals/{n}", f"rank {n}", checks))
        return report

    def _compare_inclusions(self, name: str, declared: Set[int], peers: Dict[int, str]) -> str:
        computed, status = self.computed_containers(name, peers)
        if computed is None:
            return status
        return compare("containers", sorted(computed), sorted(declared))

    # Identities and constants

    def _verify_identities(self) -> TableReport:
        report = TableReport(table="identities")

        checks: Dict[str, str] = {}
        P = np.block([[np.eye(3), -np.eye(3)], [np.eye(3), np.eye(3)]]) / np.sqrt(2)
        U6 = geometry.as_float(self.catalog.build_matrix("U_6"))
        I33 = geometry.as_float(self.catalog.build_matrix("I_{3,3}"))
        checks["conjugation"] = (
            passed("P I_{3,3} P' = U_6") if np.allclose(P @ I33 @ P.T, U6, atol=1e-12)
            else failed("P I_{3,3} P' != U_6")
        )
        self._guard(
            checks, "member",
            lambda: passed() if geometry.membership(geometry.klein_v33II(KLEIN_SAMPLE), self.catalog.build_matrix("U_6"))
            else failed("sample point not in V_{U_6}"),
        )
        report.rows.append(self._row("v33II", "U_6", checks))

        for target in self.catalog.split_targets():
            checks = {}
            try:
                split = self.catalog.curated_split(target)
                checks["split"] = passed(f"residual {split.residual:.1e}")
            except SplitFailed as e:
                checks["split"] = failed(str(e))
            report.rows.append(self._row(f"split/{target}", target, checks, self.catalog.suspect_checks(target)))

        source = self.catalog.build_matrix("I_1^-G_3")
        target = self.catalog.build_matrix("I_1H_3^-")
        holds = types.witness_holds(RELATION_WITNESS, source, target)
        report.rows.append(self._row(
            "relation/I_1^-G_3", "I_1^-G_3",
            {"witness": passed("P F P' = I_1 + (-H_3)") if holds else failed("P F P' != I_1 + (-H_3)")},
        ))
        report.rows.append(self._row(
            "relation/H_3H_3^-", "H_3H_3^-", {"witness": skipped("missing witness")}
        ))

        checks = {}
        self._guard(
            checks, "invariants",
            lambda: compare(
                "comparison",
                types.type_equal_invariants(
                    self.catalog.type_from_name("I_3F_4"), self.catalog.type_from_name("I_1^-F_6")
                ),
                types.INVARIANTS_EQUIVALENT,
            ),
        )
        report.rows.append(self._row("equal/I_3F_4", "I_3F_4", checks))

        memberships = [
            (form, member) for form in sorted(list(self.catalog.grams) + list(self.catalog.points))
            for member in self.catalog.form_members(form)
        ]
        memberships.append(("I_2+Lambda_3", "I_2^-G_3"))
        for form, member in memberships:
            checks = {}
            self._guard(checks, "member", lambda: self._membership_check(form, member))
            entry = self.catalog.grams.get(form) or self.catalog.points.get(form) or {}
            if "minimum" in entry:
                self._guard(checks, "hermite", lambda: self._form_minimum_check(form, entry))
            report.rows.append(self._row(f"member/{form}", member, checks, self.catalog.suspect_checks(member)))
        return report

    def _membership_check(self, form: str, member: str) -> str:
        A = self.catalog.witness_gram(form)
        F = self.catalog.build_matrix(member)
        residual = geometry.membership_residual(A, F)
        if geometry.membership(A, F, tol=max(self.tolerance, 1e-8)):
            return passed(f"residual {residual:.1e}")
        return failed(f"residual {residual:.1e}")

    def _form_minimum_check(self, form: str, entry: Dict[str, Any]) -> str:
        A = self.catalog.gram_values(form)
        check = self._hermite_check(density.hermite(A), entry["minimum"], form)
        if check.startswith(PASS) and "pairs" in entry:
            return compare("pairs", density.shortest_vectors(A).pairs, entry["pairs"])
        return check

    def _verify_constants(self) -> TableReport:
        report = TableReport(table="constants")
        for name in density.CONSTANTS:
            constant = density.verify_constant(name, self.catalog.witness_gram)
            detail = constant.render()
            if constant.status == PASS:
                check = passed(detail)
            elif constant.status == FAIL:
                check = failed(detail)
            else:
                check = skipped(constant.reason or detail)
            report.rows.append(self._row(name, constant.closed_form, {"value": check}, reason=constant.reason))
        return report

    # Census

    def _census_classes(self, n: int, d: int) -> List[Tuple[int, str]]:
        classes: List[Tuple[int, str]] = []
        for table_id in TORSION_TABLES:
            table = self.catalog.torsion_table(table_id)
            for cell in table["cells"]:
                if cell["n"] == n and cell["d"] == d:
                    classes.extend((cell["det"], name) for name in self._cell_classes(table, cell))
        return classes

    def _separating_invariants(self, M: ImmutableMatrix, d: int) -> tuple:
        identity = sympy.eye(M.rows)
        powers = [exact.int_matrix_power(M, j) - identity for j in sympy.divisors(d)]
        return (
            exact.det(M),
            tuple(exact.poly_coeffs(exact.char_poly(M))),
            tuple(M.rows - sympy.Matrix(P).rank() for P in powers),
            tuple(exact.rank_mod(P, 2) for P in powers),
        )

    def census_distinct(self, n: int, d: int) -> TableReport:
        """Check order and det of the listed classes, then try to tell them apart"""
        report = TableReport(table=f"census {n}/{d}")
        classes = self._census_classes(n, d)
        if not classes:
            report.rows.append(self._row(f"{n}/{d}", "-", {"cell": skipped(f"no classes listed for n={n}, d={d}")}))
            return report

        matrices = {name: self.catalog.build_matrix(name) for _, name in classes}
        invariants = {name: self._separating_invariants(M, d) for name, M in matrices.items()}
        for det, name in classes:
            M = matrices[name]
            checks = {
                "order": compare("order", exact.finite_order(M), d),
                "det": compare("det", exact.det(M), det),
            }
            twins = [other for _, other in classes if other != name and invariants[other] == invariants[name]]
            checks["separated"] = f"{UNSEPARATED}: {name}~{'~'.join(twins)}" if twins else passed()
            report.rows.append(self._row(f"{n}/{d}/{det:+d}", name, checks))
        return report
