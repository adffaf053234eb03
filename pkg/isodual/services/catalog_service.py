"""
Catalog of named matrices, Gram forms, splits and table rows, with the block-name grammar
"""

import json
import logging
import os
import re
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Set, Tuple

import numpy as np
import sympy
from jsonschema import Draft202012Validator
from scipy.linalg import block_diag
from sympy import ImmutableMatrix

from ..models import AlgType, BlockSpec, CatalogEntry, GeoType, Gram, RealSignature, RealSplit
from ..utils import expressions
from ..utils.validators import NotFound, NotIsodual, SplitFailed, ValidationError
from . import density_service as density
from . import geometry_service as geometry
from . import realtype_service as realtypes
from . import type_service as types

logger = logging.getLogger(__name__)

CATALOG_FILES = ("types", "grams", "splits", "tables", "torsion")
TYPE_LETTERS = "FGHKLMNO"

TOKEN_PATTERN = re.compile(r"([A-Z])_(\d+|\{\d+,\d+\})('{0,2})(?:\^(-|\d+))?")
REAL_TOKEN_PATTERN = re.compile(r"(?:([IJU])_(\d+|\{\d+,\d+\})|P\((\d+),(\d+)\))(?:\^(-|\d+))?")
RANGE_TEMPLATE = re.compile(r"I_\{p,(\d+)-p\}")

_PACKAGE_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


@dataclass(frozen=True)
class NameToken:
    """One block of a type name: letter, index, primes, then ^- or ^k"""

    letter: str
    index: Tuple[int, ...]
    primes: int = 0
    negated: bool = False
    power: int = 1

    @property
    def key(self) -> str:
        inner = str(self.index[0]) if len(self.index) == 1 else f"{{{self.index[0]},{self.index[1]}}}"
        return f"{self.letter}_{inner}" + "'" * self.primes

    def render(self) -> str:
        if self.negated:
            return f"{self.key}^-"
        if self.power > 1:
            return f"{self.key}^{self.power}"
        return self.key


def parse_name(name: str) -> List[NameToken]:
    """Split a juxtaposed name such as I_{1,1}J_2 or L_4^-G_3 into tokens"""
    text = str(name).strip()
    if not text:
        raise ValidationError("Empty type name")

    tokens, pos = [], 0
    while pos < len(text):
        match = TOKEN_PATTERN.match(text, pos)
        if not match:
            raise ValidationError(f"Cannot parse name {text!r} at {text[pos:]!r}")
        letter, index, primes, suffix = match.groups()
        power = int(suffix) if suffix and suffix != "-" else 1
        if power < 1:
            raise ValidationError(f"Repetition must be positive in {text!r}")
        tokens.append(
            NameToken(
                letter=letter,
                index=tuple(int(v) for v in index.strip("{}").split(",")),
                primes=len(primes),
                negated=suffix == "-",
                power=power,
            )
        )
        pos = match.end()
    return tokens


def negate_name(name: str) -> str:
    """Name of -F, written block by block"""
    parts = []
    for token in parse_name(name):
        flipped = NameToken(token.letter, token.index, token.primes, not token.negated)
        parts.extend([flipped.render()] * token.power)
    return "".join(parts)


def expand_template(template: str) -> List[str]:
    """'±I_{p,1-p}F_2' -> every I_{p,q}F_2 together with the negatives"""
    signed = template.startswith("±")
    body = template[1:] if signed else template
    match = RANGE_TEMPLATE.search(body)
    if match:
        total = int(match.group(1))
        names = [
            f"{body[:match.start()]}I_{{{p},{total - p}}}{body[match.end():]}"
            for p in range(total + 1)
        ]
    else:
        names = [body]
    if signed:
        names = [variant for name in names for variant in (name, negate_name(name))]
    return names


def parse_range(text: str) -> Set[int]:
    """'1-4,13' -> {1, 2, 3, 4, 13}"""
    values: Set[int] = set()
    for part in str(text).split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            low, high = part.split("-", 1)
            values.update(range(int(low), int(high) + 1))
        else:
            values.add(int(part))
    return values


def parse_real_type(text: str) -> RealSignature:
    """'I_1P(4,1)^-' -> (1,0; 0; {(4,1): (0,1)})"""
    source = str(text).strip()
    p = q = g = 0
    herm: Dict[Tuple[int, int], List[int]] = {}
    pos = 0
    while pos < len(source):
        match = REAL_TOKEN_PATTERN.match(source, pos)
        if not match:
            raise ValidationError(f"Cannot parse real type {source!r} at {source[pos:]!r}")
        letter, index, k, l, suffix = match.groups()
        negative = suffix == "-"
        count = int(suffix) if suffix and suffix != "-" else 1
        if letter:
            numbers = [int(v) for v in index.strip("{}").split(",")]
            if letter == "I":
                a, b = (numbers[0], 0) if len(numbers) == 1 else (numbers[0], numbers[1])
                if negative:
                    a, b = b, a
                p, q = p + count * a, q + count * b
            elif letter == "J":
                g += count * numbers[0] // 2
            else:
                p, q = p + count * numbers[0] // 2, q + count * numbers[0] // 2
        else:
            slot = herm.setdefault((int(k), int(l)), [0, 0])
            slot[1 if negative else 0] += count
        pos = match.end()
    return RealSignature(
        p=p, q=q, g=g, herm=tuple(sorted((kl, (a, b)) for kl, (a, b) in herm.items()))
    )


# Named torsion matrices


def _identity(p: int, q: int = 0) -> ImmutableMatrix:
    if p + q == 0:
        raise ValidationError("I_{0,0} is empty")
    return ImmutableMatrix(sympy.diag(*([1] * p + [-1] * q)))


def _hyperbolic(n: int, sign: int) -> ImmutableMatrix:
    if n % 2:
        raise ValidationError(f"Hyperbolic blocks need even size, got {n}")
    m = n // 2
    zero, one = sympy.zeros(m), sympy.eye(m)
    top = sympy.Matrix.hstack(zero, one)
    bottom = sympy.Matrix.hstack(sign * one, zero)
    return ImmutableMatrix(sympy.Matrix.vstack(top, bottom))


def _cyclic(p: int) -> ImmutableMatrix:
    """R_p: the cyclic permutation e_i -> e_(i+1)"""
    M = sympy.zeros(p)
    M[0, p - 1] = 1
    for i in range(1, p):
        M[i, i - 1] = 1
    return ImmutableMatrix(M)


def _companion(last_column: List[int]) -> ImmutableMatrix:
    n = len(last_column)
    M = sympy.zeros(n)
    for i in range(1, n):
        M[i, i - 1] = 1
    for i, value in enumerate(last_column):
        M[i, n - 1] = value
    return ImmutableMatrix(M)


def _corner(r: int, s: int, extra: Tuple[Tuple[int, int], ...] = ()) -> ImmutableMatrix:
    """E_{r,s}: a single 1 in the bottom-right corner, plus extra 1-based positions"""
    M = sympy.zeros(r, s)
    M[r - 1, s - 1] = 1
    for i, j in extra:
        M[i - 1, j - 1] = 1
    return ImmutableMatrix(M)


def _unit(r: int, s: int, i: int, j: int) -> ImmutableMatrix:
    M = sympy.zeros(r, s)
    M[i - 1, j - 1] = 1
    return ImmutableMatrix(M)


def _corner_prime(r: int, s: int) -> ImmutableMatrix:
    return _corner(r, s, ((r - 1, s),))


def _corner_double_prime(r: int, s: int) -> ImmutableMatrix:
    # only E''_{2,2} occurs; taken as e^{r-1,s-1} + e^{r,s}
    return _corner(r, s, ((r - 1, s - 1),))


def _upper(A, E, B) -> ImmutableMatrix:
    """[[A, E], [0, B]]"""
    A, E, B = sympy.Matrix(A), sympy.Matrix(E), sympy.Matrix(B)
    top = sympy.Matrix.hstack(A, E)
    bottom = sympy.Matrix.hstack(sympy.zeros(B.rows, A.cols), B)
    return ImmutableMatrix(sympy.Matrix.vstack(top, bottom))


def _v(n: int) -> ImmutableMatrix:
    """Companion of 1 + x + ... + x^n"""
    return _companion([-1] * n)


def _w(n: int) -> ImmutableMatrix:
    """Companion of 1 - x + x^2 - ... + x^n"""
    return _companion([-1 if i % 2 == 0 else 1 for i in range(n)])


def _x3() -> ImmutableMatrix:
    return ImmutableMatrix([[1, 0, 1], [0, 0, 1], [0, -1, 0]])


def _x4() -> ImmutableMatrix:
    return _companion([-1, 0, 0, 0])


def _x5() -> ImmutableMatrix:
    return _upper(_identity(1), _corner(1, 4), _x4())


_FIXED_TORSION: Dict[Tuple[str, int, int], Callable[[], ImmutableMatrix]] = {
    ("X", 3, 0): _x3,
    ("X", 4, 0): _x4,
    ("X", 5, 0): _x5,
    ("X", 6, 0): lambda: _upper(_hyperbolic(2, -1), _corner(2, 4), _x4()),
    ("X", 7, 0): lambda: _upper(_hyperbolic(2, -1), _corner(2, 5), _x5()),
    ("Y", 4, 0): lambda: ImmutableMatrix([[0, 0, 0, -1], [1, 0, 0, 0], [0, 1, 0, 1], [0, 0, 1, 0]]),
    ("Y", 6, 0): lambda: _upper(_hyperbolic(2, -1), _corner_prime(2, 4), _x4()),
    ("Y", 7, 0): lambda: _upper(_hyperbolic(2, -1), _corner_prime(2, 5), _x5()),
    ("Z", 4, 0): lambda: _upper(_identity(1, 1), _corner_prime(2, 2), _hyperbolic(2, -1)),
    ("Z", 4, 1): lambda: _upper(_cyclic(2), _corner_prime(2, 2), _hyperbolic(2, -1)),
    ("Z", 4, 2): lambda: _upper(_cyclic(2), _corner_double_prime(2, 2), _hyperbolic(2, -1)),
    ("T", 4, 0): lambda: _upper(_v(2), _corner(2, 2), _w(2)),
    ("T", 4, 1): lambda: _upper(_cyclic(2), _corner(2, 2), _v(2)),
    ("T", 4, 2): lambda: _upper(_cyclic(2), _corner(2, 2), _w(2)),
    ("Z", 6, 0): lambda: _upper(_identity(1, 1), _corner_prime(2, 4), _x4()),
    ("Z", 6, 1): lambda: _upper(_cyclic(2), _corner(2, 4), _x4()),
    ("Z", 6, 2): lambda: _upper(_cyclic(2), _corner_prime(2, 4), _x4()),
    ("Z", 7, 0): lambda: _upper(_x3(), _corner(3, 4), _x4()),
    ("Z", 7, 1): lambda: _upper(_x3(), _unit(3, 4, 1, 4), _x4()),
    ("Z", 7, 2): lambda: _upper(_x3(), _corner_prime(3, 4), _x4()),
}


def torsion_matrix(letter: str, index: Tuple[int, ...], primes: int = 0) -> ImmutableMatrix:
    """The named integer matrix behind a non-type letter"""
    n = index[0]
    if len(index) == 2:
        if letter != "I" or primes:
            raise ValidationError(f"Only I takes two indices, got {letter}")
        return _identity(*index)
    if primes == 0:
        if letter == "I":
            return _identity(n)
        if letter == "U":
            return _hyperbolic(n, 1)
        if letter == "J":
            return _hyperbolic(n, -1)
        if letter == "R":
            return _cyclic(n)
        if letter == "V":
            return _v(n)
        if letter == "W":
            return _w(n)
    builder = _FIXED_TORSION.get((letter, n, primes))
    if builder is None:
        raise NotFound(f"No matrix named {letter}_{n}{chr(39) * primes}")
    return builder()


def direct_sum_matrix(blocks: List[ImmutableMatrix]) -> ImmutableMatrix:
    if not blocks:
        raise ValidationError("Empty direct sum")
    return ImmutableMatrix(sympy.diag(*blocks))


class CatalogService:
    """Loads the catalog files and resolves names to matrices, forms, splits and types"""

    def __init__(self, config: Optional[Dict[str, Any]] = None):
        self.config = config or {}
        self.logger = logging.getLogger(__name__)
        self.data_dir = self.config.get("DATA_DIR") or os.path.join(_PACKAGE_DIR, "data")
        self.schema_dir = self.config.get("SCHEMA_DIR") or os.path.join(_PACKAGE_DIR, "static", "schemas")
        self.tolerance = float(self.config.get("TOLERANCE", 1e-9))

        schema = self._read_json(os.path.join(self.schema_dir, "catalog.schema.json"))
        self._validator = Draft202012Validator(schema)
        documents = {kind: self._load(kind) for kind in CATALOG_FILES}

        self.types: Dict[str, Dict[str, Any]] = {e["name"]: e for e in documents["types"]["types"]}
        self.grams: Dict[str, Dict[str, Any]] = {e["name"]: e for e in documents["grams"]["grams"]}
        self.points: Dict[str, Dict[str, Any]] = {e["name"]: e for e in documents["grams"]["points"]}
        self.splits: Dict[str, Dict[str, Any]] = {e["name"]: e for e in documents["splits"]["splits"]}
        self.tables: Dict[str, Any] = documents["tables"]
        self.torsion: Dict[str, Any] = documents["torsion"]

        self._split_targets: Dict[str, Tuple[str, List[BlockSpec]]] = {}
        for entry in self.splits.values():
            for use in entry["uses"]:
                blocks = [_block_from_dict(b) for b in use["blocks"]]
                self._split_targets[use["target"]] = (entry["name"], blocks)

        self._values: Dict[str, np.ndarray] = {}
        self._geotypes: Dict[str, GeoType] = {}
        self.logger.info(
            f"Catalog loaded from {self.data_dir}: {len(self.types)} types, "
            f"{len(self.grams) + len(self.points)} forms, {len(self.splits)} splits"
        )

    # Loading

    @staticmethod
    def _read_json(path: str) -> Dict[str, Any]:
        try:
            with open(path, "r", encoding="utf-8") as handle:
                return json.load(handle)
        except FileNotFoundError:
            raise NotFound(f"Catalog file not found: {path}")
        except json.JSONDecodeError as e:
            raise ValidationError(f"Invalid JSON in {path}: {e}")

    def _load(self, kind: str) -> Dict[str, Any]:
        path = os.path.join(self.data_dir, f"{kind}.json")
        document = self._read_json(path)
        errors = sorted(self._validator.iter_errors(document), key=lambda e: list(e.path))
        if errors:
            first = errors[0]
            location = "/".join(str(p) for p in first.path) or "<root>"
            raise ValidationError(f"{path}: {location}: {first.message}")
        if document["kind"] != kind:
            raise ValidationError(f"{path} holds kind {document['kind']!r}, expected {kind!r}")
        self.logger.debug(f"Loaded {path}")
        return document

    # Names

    def _token_matrix(self, token: NameToken) -> ImmutableMatrix:
        if token.letter in TYPE_LETTERS:
            entry = self.types.get(token.key)
            if entry is None:
                raise NotFound(f"Unknown type {token.key}")
            base = ImmutableMatrix(entry["rows"])
        else:
            base = torsion_matrix(token.letter, token.index, token.primes)
        if token.negated:
            base = -base
        return direct_sum_matrix([base] * token.power)

    def build_matrix(self, name: str) -> ImmutableMatrix:
        """Block-diagonal matrix of a juxtaposed name"""
        return direct_sum_matrix([self._token_matrix(t) for t in parse_name(name)])

    def type_from_name(self, name: str) -> AlgType:
        return types.make_type(self.build_matrix(name), name)

    def components(self, name: str) -> List[Tuple[str, ImmutableMatrix]]:
        """(token, matrix) for each block, repetitions unrolled"""
        result = []
        for token in parse_name(name):
            single = NameToken(token.letter, token.index, token.primes, token.negated)
            result.extend([(single.render(), self._token_matrix(single))] * token.power)
        return result

    def declared_real_type(self, name: str) -> RealSignature:
        entry = self.types.get(name)
        if entry is None:
            raise NotFound(f"No real type registered for {name}")
        return parse_real_type(entry["real_type"])

    def suspect_checks(self, name: str, row: Optional[Dict[str, Any]] = None) -> Dict[str, str]:
        """Check key -> recorded reason, over every block of the name, its split and the table row"""
        flagged: List[Dict[str, Any]] = []
        if name in self._split_targets:
            flagged.append(self.splits[self._split_targets[name][0]])
        try:
            flagged.extend(self.types.get(t.key, {}) for t in parse_name(name))
        except ValidationError:
            pass
        if row is not None:
            flagged.append(row)
        reasons: Dict[str, str] = {}
        for entry in flagged:
            suspect = entry.get("suspect")
            if suspect:
                for check in suspect["checks"]:
                    reasons.setdefault(check, suspect["reason"])
        return reasons

    def is_suspect(self, name: str) -> bool:
        return bool(self.suspect_checks(name))

    # Forms

    def gram(self, name: str) -> Gram:
        """A registered Gram matrix with its radical entries"""
        if name in self.grams:
            entry = self.grams[name]
            exprs = expressions.scaled_rows(entry["scale"], entry["rows"])
            return Gram(values=self.gram_values(name), exprs=exprs, name=name)
        if name in self.points:
            return Gram(values=self.gram_values(name), name=name)
        raise NotFound(f"No Gram matrix named {name}")

    def gram_values(self, name: str) -> np.ndarray:
        if name in self._values:
            return self._values[name]

        if name in self.grams:
            entry = self.grams[name]
            values = expressions.matrix_from_expressions(
                expressions.scaled_rows(entry["scale"], entry["rows"])
            )
        elif name in self.points:
            values = self._point_values(self.points[name])
        else:
            match = re.fullmatch(r"I_(\d+)", name)
            if not match:
                raise NotFound(f"No Gram matrix named {name}")
            values = np.eye(int(match.group(1)))

        self._values[name] = values
        return values

    def _point_values(self, entry: Dict[str, Any]) -> np.ndarray:
        args = {key: expressions.evaluate_complex(value) for key, value in entry["args"].items()}
        recipe = entry["recipe"]
        if recipe == "f6_point":
            point = geometry.f6_point(args["z"])
        elif recipe == "ug3_point":
            point = geometry.ug3_point(args["z"], self.gram_values(entry["gram"]))
        elif recipe == "kg_point":
            point = geometry.kg_point(args["z"], args["w"], self.split_matrix(entry["split"]))
        else:
            raise ValidationError(f"Unknown point recipe {recipe}")
        if entry.get("ascend"):
            # printed parameters are a seed; the registered form is the local maximum next to it
            F = self.geotype_for(entry["members"][0]).F
            point = density.ascend_local_max(point, F)
            self.logger.info(f"Point {entry['name']} ascended to min {density.shortest_vectors(point).min!r}")
        return point

    def witness_gram(self, spec: str) -> np.ndarray:
        """'A_2+Lambda_3' -> the block-diagonal sum of the named forms"""
        parts = [part.strip() for part in str(spec).split("+") if part.strip()]
        if not parts:
            raise ValidationError("Empty witness")
        return block_diag(*[self.gram_values(part) for part in parts])

    def form_members(self, name: str) -> List[str]:
        entry = self.grams.get(name) or self.points.get(name)
        if entry is None:
            raise NotFound(f"No Gram matrix named {name}")
        return list(entry["members"])

    # Splits

    def split_matrix(self, name: str) -> np.ndarray:
        if name not in self.splits:
            raise NotFound(f"No split named {name}")
        entry = self.splits[name]
        return expressions.matrix_from_expressions(expressions.scaled_rows(entry["scale"], entry["rows"]))

    def split_targets(self) -> List[str]:
        return sorted(self._split_targets)

    def curated_split(self, target: str, tol: Optional[float] = None) -> Optional[RealSplit]:
        """The registered P with P F0 P' = F for target, checked; None when nothing is registered"""
        if target not in self._split_targets:
            return None
        split_name, blocks = self._split_targets[target]
        F = self.build_matrix(target)
        return realtypes.split_from_plan(
            F, self.split_matrix(split_name), blocks, source=split_name,
            tol=tol if tol is not None else max(self.tolerance, 1e-9),
        )

    def geotype_for(self, name: str) -> GeoType:
        """The type with its basepoint, through the curated split when one is registered"""
        if name in self._geotypes:
            return self._geotypes[name]

        alg = self.type_from_name(name)
        split = None
        try:
            split = self.curated_split(name)
        except SplitFailed as e:
            self.logger.warning(f"Curated split for {name} rejected, computing one instead: {e}")
        geotype = geometry.make_geotype(alg, split=split)
        self._geotypes[name] = geotype
        return geotype

    # Tables

    def algebraic_table(self, table_id: str) -> Dict[str, Any]:
        try:
            return self.tables["algebraic"][str(table_id)]
        except KeyError:
            raise NotFound(f"No algebraic table {table_id}")

    def geometric_table(self, table_id: str) -> Dict[str, Any]:
        try:
            return self.tables["geometric"][str(table_id)]
        except KeyError:
            raise NotFound(f"No geometric table {table_id}")

    def inclusion_table(self, table_id: str) -> Dict[str, Any]:
        try:
            return self.tables["inclusions"][str(table_id)]
        except KeyError:
            raise NotFound(f"No inclusion table {table_id}")

    def torsion_table(self, table_id: str) -> Dict[str, Any]:
        try:
            return self.torsion["tables"][str(table_id)]
        except KeyError:
            raise NotFound(f"No torsion table {table_id}")

    def maximal_counts(self) -> Dict[int, int]:
        return {int(n): count for n, count in self.tables["maximal_counts"].items()}

    # Lookup

    def lookup(self, name: str) -> CatalogEntry:
        """Registered entries first, then the name parsed as a direct sum"""
        name = str(name).strip()
        if name in self.types:
            entry = self.types[name]
            return CatalogEntry(
                name=name, kind="type", value=types.make_type(ImmutableMatrix(entry["rows"]), name),
                provenance=entry["provenance"], notes=list(entry.get("notes", [])),
            )
        if name in self.grams or name in self.points:
            entry = self.grams.get(name) or self.points[name]
            return CatalogEntry(
                name=name, kind="gram", value=self.gram(name), provenance=entry["provenance"],
                notes=[f"member of {', '.join(entry['members'])}"],
            )
        if name in self.splits:
            entry = self.splits[name]
            return CatalogEntry(
                name=name, kind="split", value=self.split_matrix(name), provenance=entry["provenance"],
                notes=[f"splits {use['target']}" for use in entry["uses"]] + list(entry.get("notes", [])),
            )
        if name in density.CONSTANTS:
            spec = density.CONSTANTS[name]
            return CatalogEntry(
                name=name, kind="constant", value=expressions.evaluate(spec.closed_form),
                provenance=spec.closed_form,
            )

        try:
            matrix = self.build_matrix(name)
        except ValidationError:
            raise NotFound(f"Nothing registered or parseable under {name!r}")
        try:
            return CatalogEntry(name=name, kind="sum", value=types.make_type(matrix, name), provenance="parsed")
        except NotIsodual:
            return CatalogEntry(name=name, kind="matrix", value=matrix, provenance="parsed")

    def names(self, kind: Optional[str] = None) -> List[str]:
        registry = {
            "type": list(self.types),
            "gram": list(self.grams) + list(self.points),
            "split": list(self.splits),
            "constant": list(density.CONSTANTS),
        }
        if kind is not None:
            if kind not in registry:
                raise ValidationError(f"Unknown catalog kind {kind}")
            return sorted(registry[kind])
        return sorted(name for names in registry.values() for name in names)


def _block_from_dict(data: Dict[str, Any]) -> BlockSpec:
    return BlockSpec(
        kind=data["kind"],
        p=data.get("p", 0),
        q=data.get("q", 0),
        g=data.get("g", 0),
        k=data.get("k", 0),
        l=data.get("l", 0),
        signs=tuple(data.get("signs", ())),
    )

