# core/conformal.py
"""Finite-rank conformal algebras given by structure constants, C[D]-linear maps
between free modules, and the averaging-operator checks built on them."""
from dataclasses import dataclass
from itertools import product
from typing import List, Optional, Sequence, Tuple, Union

from sympy import Matrix, QQ

from core.errors import ConstructionError, DimensionError
from core.report import CheckBuilder, CheckResult, Report
from core.symalg import (
    D,
    LAMBDAS,
    POLY_RING,
    ModElem,
    Poly,
    Table,
    clean_table,
    require_lambda_bound,
    sesquilinear_eval,
    table_get,
)
from utils.logger import logger

L1, L2 = LAMBDAS[0], LAMBDAS[1]
FLIP = {L1: -D - L1}

Entry = Union[Poly, int]


@dataclass(frozen=True)
class ConformalMap:
    """Matrix over C[D]; column j is the image of the j-th basis vector."""

    rows: int
    cols: int
    entries: Tuple[Tuple[Poly, ...], ...]

    def __post_init__(self) -> None:
        if self.rows < 1 or self.cols < 1:
            raise DimensionError(f"map shape {self.rows}x{self.cols} is empty")
        if len(self.entries) != self.rows or any(len(row) != self.cols for row in self.entries):
            raise DimensionError(f"entries do not form a {self.rows}x{self.cols} matrix")
        for r, row in enumerate(self.entries):
            for c, entry in enumerate(row):
                require_lambda_bound(entry, 0, f"map entry ({r},{c})")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Entry]]) -> "ConformalMap":
        entries = tuple(tuple(POLY_RING(e) for e in row) for row in rows)
        return cls(len(entries), len(entries[0]) if entries else 0, entries)

    @classmethod
    def from_columns(cls, columns: Sequence[ModElem]) -> "ConformalMap":
        if not columns:
            raise DimensionError("a map needs at least one column")
        rows = columns[0].rank
        return cls.from_rows([[col.coords[r] for col in columns] for r in range(rows)])

    @classmethod
    def identity(cls, n: int) -> "ConformalMap":
        return cls.scalar(n, 1)

    @classmethod
    def scalar(cls, n: int, value: Entry) -> "ConformalMap":
        return cls.from_rows([[value if r == c else 0 for c in range(n)] for r in range(n)])

    @classmethod
    def zero(cls, rows: int, cols: int) -> "ConformalMap":
        return cls.from_rows([[0] * cols for _ in range(rows)])

    @classmethod
    def block(cls, blocks: Sequence[Sequence["ConformalMap"]]) -> "ConformalMap":
        """Assemble a block matrix; blocks in one row share a height, in one column a width."""
        rows: List[List[Poly]] = []
        for block_row in blocks:
            height = block_row[0].rows
            if any(b.rows != height for b in block_row):
                raise DimensionError("blocks in one row must share a height")
            for r in range(height):
                rows.append([e for b in block_row for e in b.entries[r]])
        return cls.from_rows(rows)

    def column(self, j: int) -> ModElem:
        return ModElem(tuple(self.entries[r][j] for r in range(self.rows)))

    def columns(self) -> List[ModElem]:
        return [self.column(j) for j in range(self.cols)]

    def apply(self, v: ModElem) -> ModElem:
        if v.rank != self.cols:
            raise DimensionError(f"map with {self.cols} columns applied to rank {v.rank}")
        out = []
        for row in self.entries:
            total = POLY_RING.zero
            for entry, coeff in zip(row, v.coords):
                if entry and coeff:
                    total = total + entry * coeff
            out.append(total)
        return ModElem(tuple(out))

    def compose(self, other: "ConformalMap") -> "ConformalMap":
        """self after other."""
        if self.cols != other.rows:
            raise DimensionError(f"cannot compose {self.rows}x{self.cols} with {other.rows}x{other.cols}")
        return ConformalMap.from_columns([self.apply(col) for col in other.columns()])

    def __matmul__(self, other: "ConformalMap") -> "ConformalMap":
        return self.compose(other)

    def _check_shape(self, other: "ConformalMap") -> None:
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionError("map shapes differ")

    def __add__(self, other: "ConformalMap") -> "ConformalMap":
        self._check_shape(other)
        return ConformalMap.from_rows(
            [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)]
        )

    def __sub__(self, other: "ConformalMap") -> "ConformalMap":
        self._check_shape(other)
        return ConformalMap.from_rows(
            [[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)]
        )

    def __neg__(self) -> "ConformalMap":
        return ConformalMap.from_rows([[-a for a in row] for row in self.entries])

    def scale(self, p: Entry) -> "ConformalMap":
        factor = POLY_RING(p)
        return ConformalMap.from_rows([[factor * a for a in row] for row in self.entries])

    def submatrix(self, row_start: int, row_stop: int, col_start: int, col_stop: int) -> "ConformalMap":
        return ConformalMap.from_rows(
            [list(row[col_start:col_stop]) for row in self.entries[row_start:row_stop]]
        )

    def is_zero(self) -> bool:
        return not any(e for row in self.entries for e in row)

    def to_matrix(self) -> Matrix:
        return Matrix(self.rows, self.cols, lambda r, c: self.entries[r][c].as_expr())

    def determinant(self) -> Poly:
        if self.rows != self.cols:
            raise DimensionError("determinant of a non-square map")
        det: Poly = POLY_RING.from_expr(self.to_matrix().det(method="berkowitz"))
        return det

    def is_invertible(self) -> bool:
        """Units of the matrix ring over C[D] are exactly those with nonzero constant determinant."""
        if self.rows != self.cols:
            return False
        det = self.determinant()
        return bool(det) and det.is_ground

    def inverse(self) -> "ConformalMap":
        det = self.determinant()
        if not det or not det.is_ground:
            raise ConstructionError("map is not invertible over C[d]")
        inv_det = POLY_RING(QQ.one / dict(det.items())[POLY_RING.zero_monom])
        if self.rows == 1:
            return ConformalMap.from_rows([[inv_det]])
        adjugate = self.to_matrix().adjugate(method="berkowitz")
        return ConformalMap.from_rows(
            [
                [POLY_RING.from_expr(adjugate[r, c]) * inv_det for c in range(self.cols)]
                for r in range(self.rows)
            ]
        )


@dataclass(frozen=True)
class ConformalAlgebra:
    """Structure constants: ``table[(i, j)]`` is the value of e_i (lambda = L1) e_j."""

    name: str
    basis: Tuple[str, ...]
    table: Table

    def __post_init__(self) -> None:
        object.__setattr__(self, "basis", tuple(self.basis))
        if not self.basis:
            raise DimensionError(f"{self.name}: empty basis")
        if len(set(self.basis)) != len(self.basis):
            raise DimensionError(f"{self.name}: repeated basis names")
        for key, value in self.table.items():
            if len(key) != 2 or not all(0 <= k < self.rank for k in key):
                raise DimensionError(f"{self.name}: table key {key} outside rank {self.rank}")
            if value.rank != self.rank:
                raise DimensionError(f"{self.name}: value at {key} has rank {value.rank}")
            for coeff in value.coords:
                require_lambda_bound(coeff, 1, f"{self.name} structure constant {key}")
        object.__setattr__(self, "table", clean_table(self.table))

    @property
    def rank(self) -> int:
        return len(self.basis)

    def structure(self, i: int, j: int) -> ModElem:
        return table_get(self.table, (i, j), self.rank)

    def basis_vector(self, i: int) -> ModElem:
        return ModElem.basis(self.rank, i)


class LieConformalAlgebra(ConformalAlgebra):
    """Lie conformal algebra; skew-symmetry and Jacobi are checked, never assumed."""


class AssocConformalAlgebra(ConformalAlgebra):
    """Associative conformal algebra; the table holds the product a (lambda) b."""


@dataclass(frozen=True)
class AveragingAlgebra:
    """A Lie conformal algebra together with an averaging operator."""

    algebra: LieConformalAlgebra
    operator: ConformalMap

    def __post_init__(self) -> None:
        n = self.algebra.rank
        if (self.operator.rows, self.operator.cols) != (n, n):
            raise DimensionError(f"{self.algebra.name}: operator must be {n}x{n}")

    @property
    def name(self) -> str:
        return self.algebra.name

    @property
    def rank(self) -> int:
        return self.algebra.rank


def bracket_at(A: ConformalAlgebra, x: ModElem, y: ModElem, lam: Poly) -> ModElem:
    """[x_lam y] for an arbitrary lambda polynomial (it may mention D)."""
    if x.rank != A.rank or y.rank != A.rank:
        raise DimensionError(f"{A.name}: bracket of ranks {x.rank}, {y.rank} in rank {A.rank}")
    return sesquilinear_eval(A.table, A.rank, [x, y], [lam])


def bracket_eval(A: ConformalAlgebra, x: ModElem, y: ModElem, slot: int = 1) -> ModElem:
    """[x_lambda y] with lambda the variable L<slot>."""
    return bracket_at(A, x, y, LAMBDAS[slot - 1])


def skew_table_check(
    name: str,
    table: Table,
    source_names: Sequence[str],
    target_rank: int,
    target_names: Optional[Sequence[str]] = None,
) -> CheckResult:
    """table(i,j)(D, L1) = -table(j,i)(D, -D-L1) for every ordered pair."""
    builder = CheckBuilder(name, target_names)
    n = len(source_names)
    for i, j in product(range(n), repeat=2):
        lhs = table_get(table, (i, j), target_rank)
        rhs = -table_get(table, (j, i), target_rank).subst(FLIP)
        builder.compare((source_names[i], source_names[j]), lhs, rhs)
    return builder.result()


def jacobi_table_check(name: str, table: Table, names: Sequence[str]) -> CheckResult:
    """[x_l[y_m z]] = [[x_l y]_{l+m} z] + [y_m[x_l z]] on every basis triple."""
    rank = len(names)
    builder = CheckBuilder(name, names)
    e = [ModElem.basis(rank, i) for i in range(rank)]

    def br(x: ModElem, y: ModElem, lam: Poly) -> ModElem:
        return sesquilinear_eval(table, rank, [x, y], [lam])

    for i, j, k in product(range(rank), repeat=3):
        lhs = br(e[i], br(e[j], e[k], L2), L1)
        rhs = br(br(e[i], e[j], L1), e[k], L1 + L2) + br(e[j], br(e[i], e[k], L1), L2)
        builder.compare((names[i], names[j], names[k]), lhs, rhs)
    return builder.result()


def check_skew(A: ConformalAlgebra) -> Report:
    logger.debug(f"🔍 Checking skew-symmetry of {A.name}")
    report = Report(subject=A.name)
    return report.add(skew_table_check("skew", A.table, A.basis, A.rank, A.basis))


def check_jacobi(A: ConformalAlgebra) -> Report:
    logger.debug(f"🔍 Checking the Jacobi identity of {A.name}")
    return Report(subject=A.name).add(jacobi_table_check("jacobi", A.table, A.basis))


def _require_square(A: ConformalAlgebra, P: ConformalMap) -> None:
    if (P.rows, P.cols) != (A.rank, A.rank):
        raise DimensionError(f"{A.name}: operator is {P.rows}x{P.cols}, algebra has rank {A.rank}")


def check_averaging(A: ConformalAlgebra, P: ConformalMap) -> Report:
    """P([P(x)_l y]) = [P(x)_l P(y)] on all basis pairs."""
    _require_square(A, P)
    logger.debug(f"🔍 Checking the averaging identity on {A.name}")
    builder = CheckBuilder("averaging", A.basis)
    for i, j in product(range(A.rank), repeat=2):
        px, py = P.column(i), P.column(j)
        lhs = P.apply(bracket_at(A, px, A.basis_vector(j), L1))
        rhs = bracket_at(A, px, py, L1)
        builder.compare((A.basis[i], A.basis[j]), lhs, rhs)
    return Report(subject=A.name).add(builder.result())


def check_two_sided_averaging(A: ConformalAlgebra, P: ConformalMap) -> Report:
    """The optional second identity P([x_l P(y)]) = [P(x)_l P(y)]."""
    _require_square(A, P)
    builder = CheckBuilder("two-sided-averaging", A.basis)
    for i, j in product(range(A.rank), repeat=2):
        px, py = P.column(i), P.column(j)
        lhs = P.apply(bracket_at(A, A.basis_vector(i), py, L1))
        rhs = bracket_at(A, px, py, L1)
        builder.compare((A.basis[i], A.basis[j]), lhs, rhs)
    return Report(subject=A.name).add(builder.result())


def induced_bracket(A: LieConformalAlgebra, P: ConformalMap) -> LieConformalAlgebra:
    """The bracket [x_l y]_P = [P(x)_l y]; the averaging identity is reported, not enforced."""
    _require_square(A, P)
    if not check_averaging(A, P).passed:
        logger.warning(f"⚠️ {A.name}: operator is not averaging, induced bracket may be degenerate")
    table = {
        (i, j): bracket_at(A, P.column(i), A.basis_vector(j), L1)
        for i, j in product(range(A.rank), repeat=2)
    }
    return LieConformalAlgebra(f"{A.name}_P", A.basis, table)


def check_induced_morphism(A: LieConformalAlgebra, P: ConformalMap) -> Report:
    """P maps the induced bracket to the original one: P([x_l y]_P) = [P(x)_l P(y)]."""
    induced = induced_bracket(A, P)
    builder = CheckBuilder("induced-morphism", A.basis)
    for i, j in product(range(A.rank), repeat=2):
        lhs = P.apply(induced.structure(i, j))
        rhs = bracket_at(A, P.column(i), P.column(j), L1)
        builder.compare((A.basis[i], A.basis[j]), lhs, rhs)
    return Report(subject=A.name).add(builder.result())


def map_equality_check(
    name: str,
    left: ConformalMap,
    right: ConformalMap,
    source_names: Sequence[str],
    target_names: Optional[Sequence[str]] = None,
) -> CheckResult:
    """Column by column comparison of two maps with the same shape."""
    if (left.rows, left.cols) != (right.rows, right.cols):
        raise DimensionError(f"{name}: shapes {left.rows}x{left.cols} and {right.rows}x{right.cols}")
    builder = CheckBuilder(name, target_names)
    for j in range(left.cols):
        builder.compare((source_names[j],), left.column(j), right.column(j))
    return builder.result()


def check_avg_morphism(
    source: AveragingAlgebra, target: AveragingAlgebra, psi: ConformalMap
) -> Report:
    """psi preserves brackets and intertwines the operators."""
    A, B = source.algebra, target.algebra
    if (psi.rows, psi.cols) != (B.rank, A.rank):
        raise DimensionError(f"morphism must be {B.rank}x{A.rank}")
    bracket = CheckBuilder("morphism-bracket", B.basis)
    for i, j in product(range(A.rank), repeat=2):
        lhs = psi.apply(A.structure(i, j))
        rhs = bracket_at(B, psi.column(i), psi.column(j), L1)
        bracket.compare((A.basis[i], A.basis[j]), lhs, rhs)
    report = Report(subject=f"{A.name} -> {B.name}").add(bracket.result())
    report.add(
        map_equality_check(
            "morphism-operator", psi @ source.operator, target.operator @ psi, A.basis, B.basis
        )
    )
    return report


def commutator_lca(B: AssocConformalAlgebra, name: Optional[str] = None) -> LieConformalAlgebra:
    """[a_l b] = a_l b - b_{-D-l} a."""
    table = {
        (i, j): B.structure(i, j) - B.structure(j, i).subst(FLIP)
        for i, j in product(range(B.rank), repeat=2)
    }
    return LieConformalAlgebra(name or f"{B.name}_comm", B.basis, table)


def check_conformal_associativity(B: AssocConformalAlgebra) -> Report:
    """(a_l b)_{l+m} c = a_l (b_m c) on every basis triple."""
    builder = CheckBuilder("associativity", B.basis)
    e = [B.basis_vector(i) for i in range(B.rank)]
    for i, j, k in product(range(B.rank), repeat=3):
        lhs = bracket_at(B, bracket_at(B, e[i], e[j], L1), e[k], L1 + L2)
        rhs = bracket_at(B, e[i], bracket_at(B, e[j], e[k], L2), L1)
        builder.compare((B.basis[i], B.basis[j], B.basis[k]), lhs, rhs)
    return Report(subject=B.name).add(builder.result())


def check_assoc_averaging(B: AssocConformalAlgebra, P: ConformalMap) -> Report:
    """P(P(a)_l b) = P(a)_l P(b)."""
    _require_square(B, P)
    builder = CheckBuilder("assoc-averaging", B.basis)
    for i, j in product(range(B.rank), repeat=2):
        lhs = P.apply(bracket_at(B, P.column(i), B.basis_vector(j), L1))
        rhs = bracket_at(B, P.column(i), P.column(j), L1)
        builder.compare((B.basis[i], B.basis[j]), lhs, rhs)
    return Report(subject=B.name).add(builder.result())


def direct_product(A: LieConformalAlgebra, B: LieConformalAlgebra, name: Optional[str] = None) -> LieConformalAlgebra:
    """Componentwise bracket on A + B; basis names get the suffixes _1 and _2."""
    n, total = A.rank, A.rank + B.rank
    table: Table = {}
    for (i, j), value in A.table.items():
        table[(i, j)] = value.embed(0, total)
    for (i, j), value in B.table.items():
        table[(n + i, n + j)] = value.embed(n, total)
    basis = tuple(f"{b}_1" for b in A.basis) + tuple(f"{b}_2" for b in B.basis)
    return LieConformalAlgebra(name or f"{A.name}x{B.name}", basis, table)


def direct_sum_example(
    A: LieConformalAlgebra, n: int
) -> Tuple[LieConformalAlgebra, List[ConformalMap]]:
    """n copies of A; the first acts on the others and the others form an abelian ideal.

    The bracket has first component [x1_l a1] and i-th component
    [x1_l ai] - [a1_{-D-l} xi]. Returned operators: P = sum of the copies 2..n moved
    into the first slot, followed by P_2..P_n moving a single copy.
    """
    if n < 2:
        raise ConstructionError(f"direct sum needs n >= 2 copies, got {n}")
    r = A.rank
    total = n * r
    table: Table = {}
    for i, j in product(range(r), repeat=2):
        value = A.structure(i, j)
        if value.is_zero():
            continue
        table[(i, j)] = value.embed(0, total)
        for k in range(1, n):
            table[(i, k * r + j)] = value.embed(k * r, total)
            # x_k with a_1: -[a1_{-D-l} x_k] in slot k
            table[(k * r + i, j)] = (-A.structure(j, i).subst(FLIP)).embed(k * r, total)
    basis = tuple(f"{b}_{k + 1}" for k in range(n) for b in A.basis)
    algebra = LieConformalAlgebra(f"{A.name}_sum{n}", basis, table)

    identity, zero = ConformalMap.identity(r), ConformalMap.zero(r, r)

    def operator(copies: Sequence[int]) -> ConformalMap:
        grid = [
            [identity if row == 0 and col in copies else zero for col in range(n)]
            for row in range(n)
        ]
        return ConformalMap.block(grid)

    operators = [operator(range(1, n))] + [operator([k]) for k in range(1, n)]
    return algebra, operators
