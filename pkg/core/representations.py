# core/representations.py
"""Conformal modules over a Lie conformal algebra, their averaging versions,
semidirect sums and embedding tensors."""
from dataclasses import dataclass
from itertools import product
from typing import Optional, Sequence, Tuple

from core.conformal import (
    FLIP,
    L1,
    L2,
    ConformalMap,
    LieConformalAlgebra,
    bracket_at,
    check_averaging,
)
from core.errors import ConstructionError, DimensionError
from core.report import CheckBuilder, Report
from core.symalg import (
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


@dataclass(frozen=True)
class ConformalRep:
    """``action[(i, a)]`` is rho(e_i)_L1 f_a, a module element of rank ``module_rank``."""

    algebra: LieConformalAlgebra
    module_basis: Tuple[str, ...]
    action: Table

    def __post_init__(self) -> None:
        object.__setattr__(self, "module_basis", tuple(self.module_basis))
        if not self.module_basis:
            raise DimensionError("module needs rank >= 1")
        for (i, a), value in self.action.items():
            if not (0 <= i < self.algebra.rank and 0 <= a < self.module_rank):
                raise DimensionError(f"action key {(i, a)} outside {self.algebra.rank}x{self.module_rank}")
            if value.rank != self.module_rank:
                raise DimensionError(f"action value at {(i, a)} has rank {value.rank}")
            for coeff in value.coords:
                require_lambda_bound(coeff, 1, f"action entry {(i, a)}")
        object.__setattr__(self, "action", clean_table(self.action))

    @property
    def module_rank(self) -> int:
        return len(self.module_basis)

    def act(self, x: ModElem, m: ModElem, lam: Poly) -> ModElem:
        """rho(x)_lam m, extended sesquilinearly."""
        if x.rank != self.algebra.rank or m.rank != self.module_rank:
            raise DimensionError(f"action on ranks {x.rank}, {m.rank}")
        return sesquilinear_eval(self.action, self.module_rank, [x, m], [lam])

    def value(self, i: int, a: int) -> ModElem:
        return table_get(self.action, (i, a), self.module_rank)


@dataclass(frozen=True)
class AvgRepTriple:
    """A module with a D-linear map phi over an algebra carrying the operator P."""

    rep: ConformalRep
    phi: ConformalMap
    operator: ConformalMap

    def __post_init__(self) -> None:
        m, n = self.rep.module_rank, self.rep.algebra.rank
        if (self.phi.rows, self.phi.cols) != (m, m):
            raise DimensionError(f"phi must be {m}x{m}")
        if (self.operator.rows, self.operator.cols) != (n, n):
            raise DimensionError(f"operator must be {n}x{n}")

    @property
    def algebra(self) -> LieConformalAlgebra:
        return self.rep.algebra


def adjoint_rep(A: LieConformalAlgebra) -> ConformalRep:
    return ConformalRep(A, A.basis, dict(A.table))


def induced_rep(R: ConformalRep, P: ConformalMap) -> ConformalRep:
    """rho(P x), the action of the induced algebra on the same module."""
    A = R.algebra
    if (P.rows, P.cols) != (A.rank, A.rank):
        raise DimensionError(f"operator must be {A.rank}x{A.rank}")
    table = {
        (i, a): R.act(P.column(i), ModElem.basis(R.module_rank, a), L1)
        for i, a in product(range(A.rank), range(R.module_rank))
    }
    return ConformalRep(A, R.module_basis, table)


def check_rep(R: ConformalRep) -> Report:
    """rho([x_l y])_{l+m} = rho(x)_l rho(y)_m - rho(y)_m rho(x)_l on every (i, j, a)."""
    A = R.algebra
    logger.debug(f"🔍 Checking the module axiom for {A.name} on rank {R.module_rank}")
    builder = CheckBuilder("rep", R.module_basis)
    e = [A.basis_vector(i) for i in range(A.rank)]
    for i, j, a in product(range(A.rank), range(A.rank), range(R.module_rank)):
        f = ModElem.basis(R.module_rank, a)
        lhs = R.act(bracket_at(A, e[i], e[j], L1), f, L1 + L2)
        rhs = R.act(e[i], R.act(e[j], f, L2), L1) - R.act(e[j], R.act(e[i], f, L1), L2)
        builder.compare((A.basis[i], A.basis[j], R.module_basis[a]), lhs, rhs)
    return Report(subject=f"{A.name} module").add(builder.result())


def check_avg_rep(T: AvgRepTriple) -> Report:
    """rho(Px)_l phi(m) = phi(rho(Px)_l m) = phi(rho(x)_l phi(m))."""
    R, A = T.rep, T.algebra
    left = CheckBuilder("avg-rep:left", R.module_basis)
    right = CheckBuilder("avg-rep:right", R.module_basis)
    for i, a in product(range(A.rank), range(R.module_rank)):
        px = T.operator.column(i)
        phi_m = T.phi.column(a)
        first = R.act(px, phi_m, L1)
        middle = T.phi.apply(R.act(px, ModElem.basis(R.module_rank, a), L1))
        last = T.phi.apply(R.act(A.basis_vector(i), phi_m, L1))
        names = (A.basis[i], R.module_basis[a])
        left.compare(names, first, middle)
        right.compare(names, middle, last)
    return Report(subject=f"{A.name} averaging module").add(left.result()).add(right.result())


def semidirect(A: LieConformalAlgebra, R: ConformalRep, name: Optional[str] = None) -> LieConformalAlgebra:
    """[(x+m)_l (y+n)] = ([x_l y], rho(x)_l n - rho(y)_{-D-l} m)."""
    if R.algebra != A:
        raise DimensionError("module is over a different algebra")
    n, m = A.rank, R.module_rank
    total = n + m
    table: Table = {}
    for (i, j), value in A.table.items():
        table[(i, j)] = value.embed(0, total)
    for (i, a), value in R.action.items():
        table[(i, n + a)] = value.embed(n, total)
        table[(n + a, i)] = (-value.subst(FLIP)).embed(n, total)
    basis = A.basis + R.module_basis
    if len(set(basis)) != len(basis):
        basis = A.basis + tuple(f"{b}_M" for b in R.module_basis)
    return LieConformalAlgebra(name or f"{A.name}_semidirect", basis, table)


def _require_tensor_shape(A: LieConformalAlgebra, R: ConformalRep, T: ConformalMap) -> None:
    if (T.rows, T.cols) != (A.rank, R.module_rank):
        raise DimensionError(f"embedding tensor must be {A.rank}x{R.module_rank}")


def check_embedding_tensor(A: LieConformalAlgebra, R: ConformalRep, T: ConformalMap) -> Report:
    """[T(m)_l T(n)] = T(rho(T m)_l n) on module basis pairs."""
    _require_tensor_shape(A, R, T)
    builder = CheckBuilder("embedding-tensor", A.basis)
    for a, b in product(range(R.module_rank), repeat=2):
        tm, tn = T.column(a), T.column(b)
        lhs = bracket_at(A, tm, tn, L1)
        rhs = T.apply(R.act(tm, ModElem.basis(R.module_rank, b), L1))
        builder.compare((R.module_basis[a], R.module_basis[b]), lhs, rhs)
    return Report(subject=f"{A.name} embedding tensor").add(builder.result())


def lift_embedding_tensor(
    A: LieConformalAlgebra, R: ConformalRep, T: ConformalMap
) -> Tuple[LieConformalAlgebra, ConformalMap]:
    """The semidirect sum with P_T(x, m) = (T(m), 0)."""
    _require_tensor_shape(A, R, T)
    n, m = A.rank, R.module_rank
    operator = ConformalMap.block(
        [
            [ConformalMap.zero(n, n), T],
            [ConformalMap.zero(m, n), ConformalMap.zero(m, m)],
        ]
    )
    return semidirect(A, R), operator


def semidirect_operators(T: AvgRepTriple) -> Tuple[ConformalMap, ConformalMap, ConformalMap]:
    """x+m -> x, x+m -> phi(m) and x+m -> P(x) + phi(m) on the semidirect sum.

    Averaging is not guaranteed for all three; run check_averaging on each.
    """
    n, m = T.algebra.rank, T.rep.module_rank
    zero_nm, zero_mn = ConformalMap.zero(n, m), ConformalMap.zero(m, n)
    first = ConformalMap.block(
        [[ConformalMap.identity(n), zero_nm], [zero_mn, ConformalMap.zero(m, m)]]
    )
    second = ConformalMap.block([[ConformalMap.zero(n, n), zero_nm], [zero_mn, T.phi]])
    third = ConformalMap.block([[T.operator, zero_nm], [zero_mn, T.phi]])
    return first, second, third


def check_semidirect_operators(T: AvgRepTriple) -> Report:
    algebra = semidirect(T.algebra, T.rep)
    report = Report(subject=f"{algebra.name} operators")
    for label, operator in zip(("first", "second", "third"), semidirect_operators(T)):
        report.merge(check_averaging(algebra, operator), prefix=label)
    return report


def _constant_entries(values: Sequence[ModElem], what: str) -> None:
    for value in values:
        if any(coeff and not coeff.is_ground for coeff in value.coords):
            raise ConstructionError(f"{what} must have constant entries for the tensor square")


def _kron(left: ConformalMap, right: ConformalMap) -> ConformalMap:
    rows = []
    for a, b in product(range(left.rows), range(right.rows)):
        rows.append(
            [
                left.entries[a][c] * right.entries[b][d]
                for c, d in product(range(left.cols), range(right.cols))
            ]
        )
    return ConformalMap.from_rows(rows)


def tensor_square_rep(A: LieConformalAlgebra, P: ConformalMap, mode: str = "product") -> AvgRepTriple:
    """The module A (x) A with rho(x)(a (x) b) = [x, a] (x) b + a (x) [x, b].

    Only defined for constant brackets and constant P. ``mode`` selects
    phi = P (x) 1 + 1 (x) P ("sum") or phi = P (x) P ("product").
    """
    if mode not in ("sum", "product"):
        raise ConstructionError(f"unknown tensor square mode {mode!r}")
    _constant_entries(list(A.table.values()), f"{A.name} bracket")
    _constant_entries(P.columns(), "operator")
    n = A.rank
    table: Table = {}
    for i, a, b in product(range(n), repeat=3):
        coords = [POLY_RING.zero] * (n * n)
        for k in range(n):
            coords[k * n + b] = coords[k * n + b] + A.structure(i, a).coords[k]
            coords[a * n + k] = coords[a * n + k] + A.structure(i, b).coords[k]
        table[(i, a * n + b)] = ModElem(tuple(coords))
    basis = tuple(f"{x}_{y}" for x, y in product(A.basis, repeat=2))
    rep = ConformalRep(A, basis, table)
    identity = ConformalMap.identity(n)
    phi = _kron(P, identity) + _kron(identity, P) if mode == "sum" else _kron(P, P)
    return AvgRepTriple(rep, phi, P)
