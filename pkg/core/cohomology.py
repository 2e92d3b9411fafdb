# core/cohomology.py
"""Cochains of a Lie conformal algebra with values in a module and the
differentials acting on them.

A degree-p cochain stores its value on every ordered basis p-tuple as a module
element in D and L1..L(p-1). The last lambda is implicit: wherever an identity
needs it, it is -D - L1 - ... - L(p-1), with D acting on the value.
"""
from dataclasses import dataclass
from itertools import combinations, permutations, product
from math import factorial
from typing import Dict, List, Sequence, Tuple

from core.conformal import ConformalMap, LieConformalAlgebra, induced_bracket
from core.errors import ConstructionError, DegreeError, DimensionError
from core.report import CheckBuilder, Report, single_check
from core.representations import AvgRepTriple, ConformalRep, adjoint_rep, induced_rep
from core.symalg import (
    D,
    LAMBDAS,
    ModElem,
    Poly,
    Table,
    clean_table,
    const,
    lambda_sum,
    permutation_sign,
    require_lambda_bound,
    sesquilinear_eval,
)
from utils.config_loader import get_toolkit_settings
from utils.logger import logger


def full_lambdas(count: int) -> List[Poly]:
    """L1..L(count-1) followed by the implicit -D - L1 - ... - L(count-1)."""
    explicit = list(LAMBDAS[: count - 1])
    return explicit + [-D - lambda_sum(explicit)]


def _max_degree() -> int:
    return int(get_toolkit_settings()["max_cochain_degree"])


@dataclass(frozen=True)
class Cochain:
    """A degree-p cochain on ``rep.algebra`` with values in the module of ``rep``."""

    degree: int
    rep: ConformalRep
    values: Table

    def __post_init__(self) -> None:
        if not 1 <= self.degree <= _max_degree():
            raise DegreeError(f"cochain degree {self.degree} outside 1..{_max_degree()}")
        n, m = self.rep.algebra.rank, self.rep.module_rank
        for key, value in self.values.items():
            if len(key) != self.degree or not all(0 <= k < n for k in key):
                raise DimensionError(f"cochain key {key} does not fit degree {self.degree} rank {n}")
            if value.rank != m:
                raise DimensionError(f"cochain value at {key} has rank {value.rank}, module has {m}")
            for coeff in value.coords:
                require_lambda_bound(coeff, self.degree - 1, f"degree-{self.degree} cochain value {key}")
        object.__setattr__(self, "values", clean_table(self.values))

    @classmethod
    def zero(cls, rep: ConformalRep, degree: int) -> "Cochain":
        return cls(degree, rep, {})

    @property
    def algebra(self) -> LieConformalAlgebra:
        return self.rep.algebra

    @property
    def module_rank(self) -> int:
        return self.rep.module_rank

    def value(self, key: Tuple[int, ...]) -> ModElem:
        found = self.values.get(key)
        return ModElem.zero(self.module_rank) if found is None else found

    def evaluate(self, args: Sequence[ModElem], lambdas: Sequence[Poly]) -> ModElem:
        if len(args) != self.degree:
            raise DegreeError(f"degree-{self.degree} cochain applied to {len(args)} arguments")
        return sesquilinear_eval(self.values, self.module_rank, args, lambdas)

    def _same_space(self, other: "Cochain") -> None:
        if self.degree != other.degree or self.rep != other.rep:
            raise DimensionError("cochains live in different spaces")

    def __add__(self, other: "Cochain") -> "Cochain":
        self._same_space(other)
        keys = set(self.values) | set(other.values)
        return Cochain(self.degree, self.rep, {k: self.value(k) + other.value(k) for k in keys})

    def __sub__(self, other: "Cochain") -> "Cochain":
        self._same_space(other)
        keys = set(self.values) | set(other.values)
        return Cochain(self.degree, self.rep, {k: self.value(k) - other.value(k) for k in keys})

    def __neg__(self) -> "Cochain":
        return Cochain(self.degree, self.rep, {k: -v for k, v in self.values.items()})

    def scale(self, c: Poly) -> "Cochain":
        return Cochain(self.degree, self.rep, {k: v.scale(c) for k, v in self.values.items()})

    def is_zero(self) -> bool:
        return not self.values


@dataclass(frozen=True)
class CochainPair:
    """(f, g) with f of degree p and g of degree p - 1 over the same module."""

    f: Cochain
    g: Cochain

    def __post_init__(self) -> None:
        if self.g.degree != self.f.degree - 1:
            raise DegreeError(f"pair degrees ({self.f.degree}, {self.g.degree}) must differ by one")
        if self.f.rep != self.g.rep:
            raise DimensionError("pair components live over different modules")

    @property
    def degree(self) -> int:
        return self.f.degree

    def is_zero(self) -> bool:
        return self.f.is_zero() and self.g.is_zero()


def identity_cochain(A: LieConformalAlgebra) -> Cochain:
    rep = adjoint_rep(A)
    return Cochain(1, rep, {(i,): A.basis_vector(i) for i in range(A.rank)})


def bracket_cochain(A: LieConformalAlgebra) -> Cochain:
    """The bracket itself as a degree-2 adjoint cochain (eta)."""
    return Cochain(2, adjoint_rep(A), {key: value for key, value in A.table.items()})


def operator_cochain(A: LieConformalAlgebra, P: ConformalMap) -> Cochain:
    if (P.rows, P.cols) != (A.rank, A.rank):
        raise DimensionError(f"operator must be {A.rank}x{A.rank}")
    return Cochain(1, adjoint_rep(A), {(i,): P.column(i) for i in range(A.rank)})


def _permuted_value(f: Cochain, key: Tuple[int, ...], perm: Sequence[int], lambdas: Sequence[Poly]) -> ModElem:
    """f evaluated on the permuted tuple with the lambdas permuted alongside."""
    n = f.algebra.rank
    args = [ModElem.basis(n, key[perm[s]]) for s in range(f.degree)]
    return f.evaluate(args, [lambdas[perm[s]] for s in range(f.degree - 1)])


def _tuple_names(A: LieConformalAlgebra, key: Sequence[int]) -> Tuple[str, ...]:
    return tuple(A.basis[k] for k in key)


def check_cochain(f: Cochain) -> Report:
    """Twisted skew-symmetry under every permutation of every basis tuple."""
    limit = int(get_toolkit_settings()["max_check_degree"])
    if f.degree > limit:
        raise DegreeError(f"skew-symmetry check supports degree <= {limit}, got {f.degree}")
    builder = CheckBuilder("cochain-skew", f.rep.module_basis)
    lambdas = full_lambdas(f.degree)
    identity = tuple(range(f.degree))
    for key in product(range(f.algebra.rank), repeat=f.degree):
        lhs = f.value(key)
        for perm in permutations(identity):
            if perm == identity:
                continue
            rhs = _permuted_value(f, key, perm, lambdas)
            if permutation_sign(perm) < 0:
                rhs = -rhs
            if not builder.compare(_tuple_names(f.algebra, key), lhs, rhs):
                break
    return Report(subject=f"degree-{f.degree} cochain on {f.algebra.name}").add(builder.result())


def skew_symmetrize(raw: Table, degree: int, rep: ConformalRep) -> Cochain:
    """Average of sign(t) * (t . raw) over all permutations t."""
    source = Cochain(degree, rep, raw)
    if degree == 1:
        return source
    limit = int(get_toolkit_settings()["max_check_degree"])
    if degree > limit:
        raise DegreeError(f"skew_symmetrize supports degree <= {limit}, got {degree}")
    lambdas = full_lambdas(degree)
    weight = const(1, factorial(degree))
    values: Table = {}
    for key in product(range(rep.algebra.rank), repeat=degree):
        total = ModElem.zero(rep.module_rank)
        for perm in permutations(range(degree)):
            term = _permuted_value(source, key, perm, lambdas)
            total = total + term if permutation_sign(perm) > 0 else total - term
        values[key] = total.scale(weight)
    result = Cochain(degree, rep, values)
    if not check_cochain(result).passed:
        raise ConstructionError("twisted permutation action is inconsistent on this input")
    return result


def _coboundary(
    values: Table,
    degree: int,
    bracket_table: Table,
    action_table: Table,
    rank: int,
    module_rank: int,
) -> Table:
    """Shared body of delta and delta_AO for an arbitrary bracket and action."""
    out_degree = degree + 1
    lambdas = full_lambdas(out_degree)
    e = [ModElem.basis(rank, i) for i in range(rank)]
    result: Table = {}
    for key in product(range(rank), repeat=out_degree):
        total = ModElem.zero(module_rank)
        for i in range(out_degree):
            others = [k for k in range(out_degree) if k != i]
            inner = sesquilinear_eval(
                values,
                module_rank,
                [e[key[k]] for k in others],
                [lambdas[k] for k in others][: degree - 1],
            )
            term = sesquilinear_eval(action_table, module_rank, [e[key[i]], inner], [lambdas[i]])
            total = total + term if i % 2 == 0 else total - term
        for i, j in combinations(range(out_degree), 2):
            others = [k for k in range(out_degree) if k not in (i, j)]
            inserted = sesquilinear_eval(bracket_table, rank, [e[key[i]], e[key[j]]], [lambdas[i]])
            term = sesquilinear_eval(
                values,
                module_rank,
                [inserted] + [e[key[k]] for k in others],
                ([lambdas[i] + lambdas[j]] + [lambdas[k] for k in others])[: degree - 1],
            )
            total = total + term if (i + j) % 2 == 0 else total - term
        result[key] = total
    return result


def _require_room(degree: int, what: str) -> None:
    if degree > _max_degree():
        raise DegreeError(f"{what} would have degree {degree} > {_max_degree()}")


def delta(f: Cochain) -> Cochain:
    """Coboundary of the cochain complex of the algebra with coefficients in its module."""
    _require_room(f.degree + 1, "delta")
    logger.debug(f"🔍 delta of a degree-{f.degree} cochain on {f.algebra.name}")
    values = _coboundary(
        f.values, f.degree, f.algebra.table, f.rep.action, f.algebra.rank, f.module_rank
    )
    return Cochain(f.degree + 1, f.rep, values)


def _require_triple(c: Cochain, T: AvgRepTriple) -> None:
    if c.rep != T.rep:
        raise DimensionError("cochain module differs from the averaging module")


def delta_AO(g: Cochain, T: AvgRepTriple) -> Cochain:
    """Coboundary for the operator complex: bracket [P x_l y] and action rho(P x)."""
    _require_triple(g, T)
    _require_room(g.degree + 1, "delta_AO")
    algebra = induced_bracket(T.algebra, T.operator)
    action = induced_rep(T.rep, T.operator)
    values = _coboundary(
        g.values, g.degree, algebra.table, action.action, algebra.rank, g.module_rank
    )
    return Cochain(g.degree + 1, g.rep, values)


def _on_operator_images(f: Cochain, T: AvgRepTriple, first_only: bool) -> Dict[Tuple[int, ...], Tuple[ModElem, ModElem]]:
    n = f.algebra.rank
    lambdas = list(LAMBDAS[: f.degree - 1])
    images: Dict[Tuple[int, ...], Tuple[ModElem, ModElem]] = {}
    for key in product(range(n), repeat=f.degree):
        all_p = f.evaluate([T.operator.column(k) for k in key], lambdas)
        if first_only:
            args = [T.operator.column(key[0])] + [ModElem.basis(n, k) for k in key[1:]]
            images[key] = (all_p, f.evaluate(args, lambdas))
        else:
            images[key] = (all_p, all_p)
    return images


def xi(f: Cochain, T: AvgRepTriple) -> Cochain:
    """f(Px1, ..., Pxp) - phi(f(Px1, ..., Pxp)), a chain map into the operator complex."""
    _require_triple(f, T)
    images = _on_operator_images(f, T, first_only=False)
    return Cochain(f.degree, f.rep, {k: a - T.phi.apply(b) for k, (a, b) in images.items()})


def xi_literal(f: Cochain, T: AvgRepTriple) -> Cochain:
    """f(Px1, ..., Pxp) - phi(f(Px1, x2, ..., xp)); differs from xi once p >= 2."""
    _require_triple(f, T)
    images = _on_operator_images(f, T, first_only=True)
    return Cochain(f.degree, f.rep, {k: a - T.phi.apply(b) for k, (a, b) in images.items()})


def d_AL(pair: CochainPair, T: AvgRepTriple) -> CochainPair:
    """(delta f, -xi f - delta_AO g)."""
    if pair.degree < 2:
        raise DegreeError("d_AL is defined for pairs of degree >= 2")
    f, g = pair.f, pair.g
    return CochainPair(delta(f), -xi(f, T) - delta_AO(g, T))


def _require_adjoint(*cochains: Cochain) -> None:
    first = cochains[0].algebra
    for c in cochains:
        if c.algebra != first:
            raise DimensionError("cochains live over different algebras")
        if c.module_rank != first.rank or c.rep.action != first.table:
            raise DimensionError("circle product needs adjoint coefficients")


def circle(f: Cochain, g: Cochain) -> Cochain:
    """Sum over (q, p-1)-shuffles of f(g(x_block), x_rest) with g's lambda sum in f's first slot."""
    _require_adjoint(f, g)
    p, q = f.degree, g.degree
    out_degree = p + q - 1
    _require_room(out_degree, "circle product")
    n = f.algebra.rank
    lambdas = full_lambdas(out_degree)
    e = [ModElem.basis(n, i) for i in range(n)]
    shuffles = []
    for block in combinations(range(out_degree), q):
        rest = tuple(k for k in range(out_degree) if k not in block)
        shuffles.append((block, rest, permutation_sign(block + rest)))

    values: Table = {}
    for key in product(range(n), repeat=out_degree):
        total = ModElem.zero(n)
        for block, rest, sign in shuffles:
            inner = g.evaluate([e[key[k]] for k in block], [lambdas[k] for k in block[:-1]])
            if inner.is_zero():
                continue
            f_lambdas = [lambda_sum(lambdas[k] for k in block)] + [lambdas[k] for k in rest]
            term = f.evaluate([inner] + [e[key[k]] for k in rest], f_lambdas[: p - 1])
            total = total + term if sign > 0 else total - term
        values[key] = total
    return Cochain(out_degree, f.rep, values)


def nr_bracket(f: Cochain, g: Cochain) -> Cochain:
    """f o g - (-1)^((p-1)(q-1)) g o f."""
    forward, backward = circle(f, g), circle(g, f)
    if (f.degree - 1) * (g.degree - 1) % 2 == 0:
        return forward - backward
    return forward + backward


def d_eta(eta: Cochain, g: Cochain) -> Cochain:
    return nr_bracket(eta, g)


def cochain_equality_check(name: str, left: Cochain, right: Cochain) -> Report:
    """Tuple by tuple comparison of two cochains of one degree."""
    if left.degree != right.degree:
        raise DegreeError(f"{name}: degrees {left.degree} and {right.degree} differ")
    builder = CheckBuilder(name, left.rep.module_basis)
    for key in sorted(set(left.values) | set(right.values)):
        builder.compare(_tuple_names(left.algebra, key), left.value(key), right.value(key))
    return Report(subject=f"{left.algebra.name} degree {left.degree}").add(builder.result())


def mc_check(eta: Cochain) -> Report:
    """[eta, eta] = 0 in the Nijenhuis-Richardson bracket."""
    if eta.degree != 2:
        raise DegreeError(f"Maurer-Cartan elements have degree 2, got {eta.degree}")
    square = nr_bracket(eta, eta)
    return cochain_equality_check("maurer-cartan", square, Cochain.zero(eta.rep, 3))


def compare_d_eta_delta(eta: Cochain, g: Cochain) -> Report:
    """Compare d_eta(g) with delta(g); passes when they agree up to one global sign."""
    bracket = d_eta(eta, g)
    coboundary = delta(g)
    if bracket == coboundary:
        sign, detail = 1, "d_eta = +delta"
    elif bracket == -coboundary:
        sign, detail = -1, "d_eta = -delta"
    else:
        sign, detail = 0, "no global sign relates d_eta and delta"
    report = Report(subject=f"{g.algebra.name} degree {g.degree}")
    report.add(single_check("d-eta-vs-delta", sign != 0, detail))
    report.artifacts["sign"] = sign
    return report


def check_nr_jacobi(f: Cochain, g: Cochain, h: Cochain) -> Report:
    """[f,[g,h]] = [[f,g],h] + (-1)^((p-1)(q-1)) [g,[f,h]]."""
    lhs = nr_bracket(f, nr_bracket(g, h))
    first = nr_bracket(nr_bracket(f, g), h)
    second = nr_bracket(g, nr_bracket(f, h))
    rhs = first + second if (f.degree - 1) * (g.degree - 1) % 2 == 0 else first - second
    return cochain_equality_check("nr-jacobi", lhs, rhs)
