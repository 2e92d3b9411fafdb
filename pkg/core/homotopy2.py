# core/homotopy2.py
"""Two-term homotopy Lie conformal algebras with a homotopy averaging operator,
their skeletal and strict cases, and crossed modules of averaging algebras."""
from dataclasses import dataclass, field
from itertools import product
from typing import List, Optional, Sequence, Tuple

from core.cohomology import (
    Cochain,
    CochainPair,
    check_cochain,
    cochain_equality_check,
    d_AL,
    delta,
    delta_AO,
    full_lambdas,
    xi,
    xi_literal,
)
from core.conformal import (
    FLIP,
    L1,
    L2,
    AveragingAlgebra,
    ConformalMap,
    LieConformalAlgebra,
    bracket_at,
    check_averaging,
    check_avg_morphism,
    check_jacobi,
    check_skew,
    direct_product,
    map_equality_check,
    skew_table_check,
)
from core.errors import ConstructionError, DimensionError
from core.report import CheckBuilder, CheckResult, Report, single_check
from core.representations import AvgRepTriple, ConformalRep, check_avg_rep, check_rep
from core.symalg import (
    ModElem,
    Poly,
    Table,
    clean_table,
    require_lambda_bound,
    sesquilinear_eval,
)
from utils.logger import logger


def _validate_table(
    table: Table, arity: int, source_ranks: Sequence[int], target_rank: int, what: str
) -> Table:
    for key, value in table.items():
        if len(key) != arity or not all(0 <= k < r for k, r in zip(key, source_ranks)):
            raise DimensionError(f"{what}: key {key} outside the source ranks {tuple(source_ranks)}")
        if value.rank != target_rank:
            raise DimensionError(f"{what}: value at {key} has rank {value.rank}, expected {target_rank}")
        for coeff in value.coords:
            require_lambda_bound(coeff, arity - 1, f"{what} {key}")
    return clean_table(table)


def _joined_basis(lower: Sequence[str], upper: Sequence[str]) -> Tuple[str, ...]:
    if set(lower) & set(upper):
        return tuple(f"{b}_0" for b in lower) + tuple(f"{b}_1" for b in upper)
    return tuple(lower) + tuple(upper)


@dataclass(frozen=True)
class TwoTermLInfinity:
    """d: L1 -> L0 with brackets L0 x L0 -> L0, L0 x L1 -> L1 and the ternary l3.

    The bracket of two L1 elements vanishes and the L1 x L0 bracket is the
    skew mirror of ``bracket01``, so neither is stored.
    """

    name: str
    basis0: Tuple[str, ...]
    basis1: Tuple[str, ...]
    d: ConformalMap
    bracket00: Table
    bracket01: Table
    l3: Table = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "basis0", tuple(self.basis0))
        object.__setattr__(self, "basis1", tuple(self.basis1))
        r0, r1 = self.rank0, self.rank1
        if r0 < 1 or r1 < 1:
            raise DimensionError(f"{self.name}: both degrees need rank >= 1")
        if (self.d.rows, self.d.cols) != (r0, r1):
            raise DimensionError(f"{self.name}: d must be {r0}x{r1}")
        object.__setattr__(
            self, "bracket00", _validate_table(self.bracket00, 2, (r0, r0), r0, "bracket00")
        )
        object.__setattr__(
            self, "bracket01", _validate_table(self.bracket01, 2, (r0, r1), r1, "bracket01")
        )
        object.__setattr__(self, "l3", _validate_table(self.l3, 3, (r0, r0, r0), r1, "l3"))

    @property
    def rank0(self) -> int:
        return len(self.basis0)

    @property
    def rank1(self) -> int:
        return len(self.basis1)

    @property
    def bracket10(self) -> Table:
        """[[m_l x]] = -[[x_{-D-l} m]]."""
        return clean_table({(a, i): -v.subst(FLIP) for (i, a), v in self.bracket01.items()})

    def lower_algebra(self) -> LieConformalAlgebra:
        return LieConformalAlgebra(f"{self.name}_0", self.basis0, self.bracket00)

    def module(self) -> ConformalRep:
        return ConformalRep(self.lower_algebra(), self.basis1, self.bracket01)

    def l3_cochain(self) -> Cochain:
        return Cochain(3, self.module(), self.l3)

    def br00(self, x: ModElem, y: ModElem, lam: Poly) -> ModElem:
        return sesquilinear_eval(self.bracket00, self.rank0, [x, y], [lam])

    def br01(self, x: ModElem, m: ModElem, lam: Poly) -> ModElem:
        return sesquilinear_eval(self.bracket01, self.rank1, [x, m], [lam])

    def br10(self, m: ModElem, x: ModElem, lam: Poly) -> ModElem:
        return sesquilinear_eval(self.bracket10, self.rank1, [m, x], [lam])

    def ternary(self, x: ModElem, y: ModElem, z: ModElem, lams: Sequence[Poly]) -> ModElem:
        return sesquilinear_eval(self.l3, self.rank1, [x, y, z], lams)

    def e0(self, i: int) -> ModElem:
        return ModElem.basis(self.rank0, i)

    def f1(self, a: int) -> ModElem:
        return ModElem.basis(self.rank1, a)


@dataclass(frozen=True)
class HomotopyAvg:
    """(P0, P1, P2) with P2: L0 x L0 -> L1."""

    P0: ConformalMap
    P1: ConformalMap
    P2: Table = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "P2", clean_table(self.P2))

    def validate(self, T: TwoTermLInfinity) -> None:
        if (self.P0.rows, self.P0.cols) != (T.rank0, T.rank0):
            raise DimensionError(f"P0 must be {T.rank0}x{T.rank0}")
        if (self.P1.rows, self.P1.cols) != (T.rank1, T.rank1):
            raise DimensionError(f"P1 must be {T.rank1}x{T.rank1}")
        _validate_table(self.P2, 2, (T.rank0, T.rank0), T.rank1, "P2")

    def p2(self, T: TwoTermLInfinity, x: ModElem, y: ModElem, lam: Poly) -> ModElem:
        return sesquilinear_eval(self.P2, T.rank1, [x, y], [lam])

    def p2_cochain(self, T: TwoTermLInfinity) -> Cochain:
        return Cochain(2, T.module(), self.P2)


@dataclass(frozen=True)
class TwoTermMorphism:
    """(f0, f1, f2) with f2: L0 x L0 -> L1'."""

    f0: ConformalMap
    f1: ConformalMap
    f2: Table = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "f2", clean_table(self.f2))


def identity_morphism(T: TwoTermLInfinity) -> TwoTermMorphism:
    return TwoTermMorphism(ConformalMap.identity(T.rank0), ConformalMap.identity(T.rank1), {})


def check_2term(T: TwoTermLInfinity) -> Report:
    """Every defining identity of the structure on all basis tuples."""
    logger.debug(f"🔍 Checking the two-term structure {T.name}")
    r0, r1 = T.rank0, T.rank1
    e, f = [T.e0(i) for i in range(r0)], [T.f1(a) for a in range(r1)]
    report = Report(subject=T.name)

    report.add(
        single_check("upper-bracket-zero", True, "holds by construction: the L1 x L1 bracket is not stored")
    )
    report.add(
        single_check("mixed-skew", True, "holds by construction: the L1 x L0 bracket is derived from L0 x L1")
    )
    report.add(skew_table_check("lower-skew", T.bracket00, T.basis0, r0, T.basis0))

    equivariance = CheckBuilder("d-equivariance", T.basis0)
    for i, a in product(range(r0), range(r1)):
        lhs = T.d.apply(T.br01(e[i], f[a], L1))
        rhs = T.br00(e[i], T.d.column(a), L1)
        equivariance.compare((T.basis0[i], T.basis1[a]), lhs, rhs)
    report.add(equivariance.result())

    symmetry = CheckBuilder("d-symmetry", T.basis1)
    for a, b in product(range(r1), repeat=2):
        lhs = T.br01(T.d.column(a), f[b], L1)
        rhs = T.br10(f[a], T.d.column(b), L1)
        symmetry.compare((T.basis1[a], T.basis1[b]), lhs, rhs)
    report.add(symmetry.result())

    lower = CheckBuilder("lower-jacobi-homotopy", T.basis0)
    for i, j, k in product(range(r0), repeat=3):
        lhs = T.d.apply(T.ternary(e[i], e[j], e[k], [L1, L2]))
        rhs = (
            T.br00(e[i], T.br00(e[j], e[k], L2), L1)
            - T.br00(T.br00(e[i], e[j], L1), e[k], L1 + L2)
            - T.br00(e[j], T.br00(e[i], e[k], L1), L2)
        )
        lower.compare((T.basis0[i], T.basis0[j], T.basis0[k]), lhs, rhs)
    report.add(lower.result())

    mixed = CheckBuilder("mixed-jacobi-homotopy", T.basis1)
    for i, j, a in product(range(r0), range(r0), range(r1)):
        lhs = T.ternary(e[i], e[j], T.d.column(a), [L1, L2])
        rhs = (
            T.br01(e[i], T.br01(e[j], f[a], L2), L1)
            - T.br01(T.br00(e[i], e[j], L1), f[a], L1 + L2)
            - T.br01(e[j], T.br01(e[i], f[a], L1), L2)
        )
        mixed.compare((T.basis0[i], T.basis0[j], T.basis1[a]), lhs, rhs)
    report.add(mixed.result())

    closed = delta(T.l3_cochain())
    report.merge(
        cochain_equality_check("l3-closed", closed, Cochain.zero(closed.rep, closed.degree))
    )
    report.add(_cochain_skew(T.l3_cochain(), "l3-skew"))
    return report


def _cochain_skew(c: Cochain, name: str) -> CheckResult:
    result = check_cochain(c).checks[0]
    return result.model_copy(update={"name": name})


def check_homotopy_avg(T: TwoTermLInfinity, P: HomotopyAvg) -> Report:
    """The operator identities, with both forms of the two double equalities."""
    P.validate(T)
    r0, r1 = T.rank0, T.rank1
    e, f = [T.e0(i) for i in range(r0)], [T.f1(a) for a in range(r1)]
    P0, P1 = P.P0, P.P1
    report = Report(subject=f"{T.name} operator")

    report.add(
        map_equality_check("operator-chain-map", P0 @ T.d, T.d @ P1, T.basis1, T.basis0)
    )

    homotopy = CheckBuilder("operator-homotopy", T.basis0)
    for i, j in product(range(r0), repeat=2):
        lhs = T.d.apply(P.p2(T, e[i], e[j], L1))
        rhs = T.br00(P0.column(i), P0.column(j), L1) - P0.apply(
            T.br00(P0.column(i), e[j], L1)
        )
        homotopy.compare((T.basis0[i], T.basis0[j]), lhs, rhs)
    report.add(homotopy.result())

    left_a = CheckBuilder("operator-left-d:a", T.basis1)
    left_b = CheckBuilder("operator-left-d:b", T.basis1)
    right_a = CheckBuilder("operator-right-d:a", T.basis1)
    right_b = CheckBuilder("operator-right-d:b", T.basis1)
    for i, a in product(range(r0), range(r1)):
        px, pm, dm = P0.column(i), P1.column(a), T.d.column(a)
        names = (T.basis0[i], T.basis1[a])
        common = T.br01(px, pm, L1)
        lhs = P.p2(T, e[i], dm, L1)
        left_a.compare(names, lhs, common - P1.apply(T.br01(px, f[a], L1)))
        left_b.compare(names, lhs, common - P1.apply(T.br01(e[i], pm, L1)))
        common = T.br10(pm, px, L1)
        lhs = P.p2(T, dm, e[i], L1)
        right_a.compare(names[::-1], lhs, common - P1.apply(T.br10(f[a], px, L1)))
        right_b.compare(names[::-1], lhs, common - P1.apply(T.br10(pm, e[i], L1)))
    for builder in (left_a, left_b, right_a, right_b):
        report.add(builder.result())

    triple = AvgRepTriple(T.module(), P1, P0)
    p2 = P.p2_cochain(T)
    l3_check = cochain_equality_check("operator-l3", xi(T.l3_cochain(), triple), -delta_AO(p2, triple))
    report.merge(l3_check)
    report.add(skew_table_check("P2-skew", P.P2, T.basis0, r1, T.basis1))
    return report


def literal_form_checks(T: TwoTermLInfinity, P: HomotopyAvg) -> Report:
    """Variants of "l3-closed" and "operator-l3" kept for comparison.

    "l3-closed:literal" flips the sign of the l3(x, [y_mu z], w) term of the
    closure identity and "operator-l3:literal" reads xi_literal(l3) = delta_AO(P2).
    Neither is part of check_2term or check_homotopy_avg.
    """
    P.validate(T)
    e = [T.e0(i) for i in range(T.rank0)]
    lam1, lam2, lam3, lam4 = full_lambdas(4)
    report = Report(subject=f"{T.name} literal forms")

    closed = CheckBuilder("l3-closed:literal", T.basis1)
    for i, j, k, m in product(range(T.rank0), repeat=4):
        x, y, z, w = e[i], e[j], e[k], e[m]
        lhs = (
            T.br01(x, T.ternary(y, z, w, [lam2, lam3]), lam1)
            - T.br01(y, T.ternary(x, z, w, [lam1, lam3]), lam2)
            + T.br01(z, T.ternary(x, y, w, [lam1, lam2]), lam3)
            - T.br01(w, T.ternary(x, y, z, [lam1, lam2]), lam4)
        )
        rhs = (
            T.ternary(T.br00(x, y, lam1), z, w, [lam1 + lam2, lam3])
            + T.ternary(y, T.br00(x, z, lam1), w, [lam2, lam1 + lam3])
            + T.ternary(y, z, T.br00(x, w, lam1), [lam2, lam3])
            + T.ternary(x, T.br00(y, z, lam2), w, [lam1, lam2 + lam3])
            - T.ternary(x, z, T.br00(y, w, lam2), [lam1, lam3])
            + T.ternary(x, y, T.br00(z, w, lam3), [lam1, lam2])
        )
        closed.compare((T.basis0[i], T.basis0[j], T.basis0[k], T.basis0[m]), lhs, rhs)
    report.add(closed.result())

    triple = AvgRepTriple(T.module(), P.P1, P.P0)
    report.merge(
        cochain_equality_check(
            "operator-l3:literal", xi_literal(T.l3_cochain(), triple), delta_AO(P.p2_cochain(T), triple)
        )
    )
    return report

def check_morphism(
    T: TwoTermLInfinity, T2: TwoTermLInfinity, M: TwoTermMorphism
) -> Report:
    """The morphism identities from T to T2."""
    r0, r1 = T.rank0, T.rank1
    if (M.f0.rows, M.f0.cols) != (T2.rank0, r0) or (M.f1.rows, M.f1.cols) != (T2.rank1, r1):
        raise DimensionError("morphism maps do not match the two structures")
    f2_table = _validate_table(M.f2, 2, (r0, r0), T2.rank1, "f2")
    e, f = [T.e0(i) for i in range(r0)], [T.f1(a) for a in range(r1)]
    f0, f1 = M.f0, M.f1

    def f2(x: ModElem, y: ModElem, lam: Poly) -> ModElem:
        return sesquilinear_eval(f2_table, T2.rank1, [x, y], [lam])

    report = Report(subject=f"{T.name} -> {T2.name}")
    report.add(map_equality_check("morphism-chain-map", f0 @ T.d, T2.d @ f1, T.basis1, T2.basis0))

    bracket = CheckBuilder("morphism-bracket-homotopy", T2.basis0)
    for i, j in product(range(r0), repeat=2):
        lhs = T2.d.apply(f2(e[i], e[j], L1))
        rhs = T2.br00(f0.column(i), f0.column(j), L1) - f0.apply(T.br00(e[i], e[j], L1))
        bracket.compare((T.basis0[i], T.basis0[j]), lhs, rhs)
    report.add(bracket.result())

    left = CheckBuilder("morphism-left-d", T2.basis1)
    right = CheckBuilder("morphism-right-d", T2.basis1)
    for i, a in product(range(r0), range(r1)):
        dm = T.d.column(a)
        lhs = f2(e[i], dm, L1)
        rhs = T2.br01(f0.column(i), f1.column(a), L1) - f1.apply(T.br01(e[i], f[a], L1))
        left.compare((T.basis0[i], T.basis1[a]), lhs, rhs)
        lhs = f2(dm, e[i], L1)
        rhs = T2.br10(f1.column(a), f0.column(i), L1) - f1.apply(T.br10(f[a], e[i], L1))
        right.compare((T.basis1[a], T.basis0[i]), lhs, rhs)
    report.add(left.result()).add(right.result())

    ternary = CheckBuilder("morphism-l3", T2.basis1)
    for i, j, k in product(range(r0), repeat=3):
        x, y, z = e[i], e[j], e[k]
        lhs = T2.ternary(f0.column(i), f0.column(j), f0.column(k), [L1, L2]) - f1.apply(
            T.ternary(x, y, z, [L1, L2])
        )
        rhs = (
            T2.br01(f0.column(i), f2(y, z, L2), L1)
            + f2(x, T.br00(y, z, L2), L1)
            - T2.br01(f0.column(j), f2(x, z, L1), L2)
            - f2(y, T.br00(x, z, L1), L2)
            - T2.br10(f2(x, y, L1), f0.column(k), L1 + L2)
            - f2(T.br00(x, y, L1), z, L1 + L2)
        )
        ternary.compare((T.basis0[i], T.basis0[j], T.basis0[k]), lhs, rhs)
    report.add(ternary.result())
    report.add(skew_table_check("f2-skew", f2_table, T.basis0, T2.rank1, T2.basis1))
    return report


def classify(T: TwoTermLInfinity, P: HomotopyAvg) -> List[str]:
    """Labels among "skeletal" (d = 0) and "strict" (l3 = 0, P2 = 0); "neither" otherwise."""
    labels = []
    if T.d.is_zero():
        labels.append("skeletal")
    if not T.l3 and not P.P2:
        labels.append("strict")
    return labels or ["neither"]


def skeletal_to_cocycle(T: TwoTermLInfinity, P: HomotopyAvg) -> Tuple[AvgRepTriple, CochainPair]:
    """(l3, P2) as a closed degree-3 pair over (L0, P0) with coefficients in (L1, P1)."""
    if "skeletal" not in classify(T, P):
        raise ConstructionError(f"{T.name} is not skeletal (d != 0)")
    P.validate(T)
    triple = AvgRepTriple(T.module(), P.P1, P.P0)
    pair = CochainPair(T.l3_cochain(), P.p2_cochain(T))
    if not d_AL(pair, triple).is_zero():
        raise ConstructionError(f"{T.name}: (l3, P2) is not closed")
    return triple, pair


def cocycle_to_skeletal(
    triple: AvgRepTriple, pair: CochainPair, name: Optional[str] = None
) -> Tuple[TwoTermLInfinity, HomotopyAvg]:
    """Skeletal structure with d = 0 whose ternary bracket and P2 come from a closed pair."""
    if pair.degree != 3:
        raise ConstructionError(f"skeletal data come from degree-3 pairs, got {pair.degree}")
    if pair.f.rep != triple.rep:
        raise DimensionError("pair module differs from the averaging module")
    if not d_AL(pair, triple).is_zero():
        raise ConstructionError("pair is not closed")
    A, R = triple.algebra, triple.rep
    T = TwoTermLInfinity(
        name or A.name,
        A.basis,
        R.module_basis,
        ConformalMap.zero(A.rank, R.module_rank),
        dict(A.table),
        dict(R.action),
        dict(pair.f.values),
    )
    return T, HomotopyAvg(triple.operator, triple.phi, dict(pair.g.values))


def skeletal_equiv_check(
    T: TwoTermLInfinity,
    P: HomotopyAvg,
    T2: TwoTermLInfinity,
    P2: HomotopyAvg,
    f: Cochain,
    xi_map: Cochain,
) -> Report:
    """(l3', P2') = (l3, P2) + d_AL(f, xi) for the given witness."""
    for label, (S, Q) in (("first", (T, P)), ("second", (T2, P2))):
        if "skeletal" not in classify(S, Q):
            raise ConstructionError(f"{label} structure is not skeletal")
    same = (
        T.basis0 == T2.basis0
        and T.basis1 == T2.basis1
        and T.bracket00 == T2.bracket00
        and T.bracket01 == T2.bracket01
        and P.P0 == P2.P0
        and P.P1 == P2.P1
    )
    if not same:
        raise ConstructionError("skeletal equivalence needs equal brackets and operators")
    triple = AvgRepTriple(T.module(), P.P1, P.P0)
    image = d_AL(CochainPair(f, xi_map), triple)
    report = Report(subject=f"{T.name} ~ {T2.name}")
    report.merge(
        cochain_equality_check("equivalence-l3", T2.l3_cochain(), T.l3_cochain() + image.f)
    )
    report.merge(
        cochain_equality_check("equivalence-P2", P2.p2_cochain(T2), P.p2_cochain(T) + image.g)
    )
    return report


@dataclass(frozen=True)
class CrossedModule:
    """d: upper -> lower with lower acting on upper."""

    upper: AveragingAlgebra
    lower: AveragingAlgebra
    d: ConformalMap
    action: ConformalRep

    def __post_init__(self) -> None:
        if (self.d.rows, self.d.cols) != (self.lower.rank, self.upper.rank):
            raise DimensionError(f"d must be {self.lower.rank}x{self.upper.rank}")
        if self.action.algebra != self.lower.algebra or self.action.module_rank != self.upper.rank:
            raise DimensionError("action must be a module of the lower algebra on the upper one")


def check_crossed_module(C: CrossedModule) -> Report:
    """Both averaging algebras, the averaging module, d as a morphism, equivariance and Peiffer."""
    upper, lower = C.upper.algebra, C.lower.algebra
    report = Report(subject=f"{upper.name} -> {lower.name}")
    for label, avg in (("lower", C.lower), ("upper", C.upper)):
        report.merge(check_skew(avg.algebra), prefix=label)
        report.merge(check_jacobi(avg.algebra), prefix=label)
        report.merge(check_averaging(avg.algebra, avg.operator), prefix=label)
    report.merge(check_rep(C.action), prefix="action")
    report.merge(check_avg_rep(AvgRepTriple(C.action, C.upper.operator, C.lower.operator)), prefix="action")
    report.merge(check_avg_morphism(C.upper, C.lower, C.d), prefix="d")

    equivariance = CheckBuilder("equivariance", lower.basis)
    for i, a in product(range(lower.rank), range(upper.rank)):
        lhs = C.d.apply(C.action.act(lower.basis_vector(i), upper.basis_vector(a), L1))
        rhs = bracket_at(lower, lower.basis_vector(i), C.d.column(a), L1)
        equivariance.compare((lower.basis[i], upper.basis[a]), lhs, rhs)
    report.add(equivariance.result())

    peiffer = CheckBuilder("peiffer", upper.basis)
    for a, b in product(range(upper.rank), repeat=2):
        lhs = C.action.act(C.d.column(a), upper.basis_vector(b), L1)
        rhs = upper.structure(a, b)
        peiffer.compare((upper.basis[a], upper.basis[b]), lhs, rhs)
    report.add(peiffer.result())
    return report


def strict_to_crossed(T: TwoTermLInfinity, P: HomotopyAvg) -> CrossedModule:
    """Upper bracket [m_l n] = [[dm_l n]], action rho(x)_l m = [[x_l m]]."""
    if "strict" not in classify(T, P):
        raise ConstructionError(f"{T.name} is not strict (l3 or P2 nonzero)")
    P.validate(T)
    lower = T.lower_algebra()
    upper_table = {
        (a, b): T.br01(T.d.column(a), T.f1(b), L1)
        for a, b in product(range(T.rank1), repeat=2)
    }
    upper = LieConformalAlgebra(f"{T.name}_1", T.basis1, upper_table)
    action = ConformalRep(lower, T.basis1, T.bracket01)
    return CrossedModule(AveragingAlgebra(upper, P.P1), AveragingAlgebra(lower, P.P0), T.d, action)


def crossed_to_strict(C: CrossedModule, name: Optional[str] = None) -> Tuple[TwoTermLInfinity, HomotopyAvg]:
    lower = C.lower.algebra
    T = TwoTermLInfinity(
        name or lower.name.removesuffix("_0"),
        lower.basis,
        C.upper.algebra.basis,
        C.d,
        dict(lower.table),
        dict(C.action.action),
        {},
    )
    return T, HomotopyAvg(C.lower.operator, C.upper.operator, {})


def crossed_direct_sum(C: CrossedModule) -> Tuple[LieConformalAlgebra, ConformalMap]:
    """([x_l y], rho(x)_l n - rho(y)_{-D-l} m + [m_l n]) with P0 + P1."""
    lower, upper = C.lower.algebra, C.upper.algebra
    n, m = lower.rank, upper.rank
    total = n + m
    table: Table = {}
    for key, value in lower.table.items():
        table[key] = value.embed(0, total)
    for (i, a), value in C.action.action.items():
        table[(i, n + a)] = value.embed(n, total)
        table[(n + a, i)] = (-value.subst(FLIP)).embed(n, total)
    for (a, b), value in upper.table.items():
        table[(n + a, n + b)] = value.embed(n, total)
    algebra = LieConformalAlgebra(
        f"{lower.name}+{upper.name}", _joined_basis(lower.basis, upper.basis), table
    )
    return algebra, _block_diagonal(C.lower.operator, C.upper.operator)


def _block_diagonal(first: ConformalMap, second: ConformalMap) -> ConformalMap:
    return ConformalMap.block(
        [
            [first, ConformalMap.zero(first.rows, second.cols)],
            [ConformalMap.zero(second.rows, first.cols), second],
        ]
    )


def strict_direct_sum(T: TwoTermLInfinity, P: HomotopyAvg) -> Tuple[LieConformalAlgebra, ConformalMap]:
    """([[x_l y]], [[x_l n]] - [[y_{-D-l} m]] + [[dm_l n]]) with P0 + P1, built from the strict data."""
    if "strict" not in classify(T, P):
        raise ConstructionError(f"{T.name} is not strict (l3 or P2 nonzero)")
    r0, r1 = T.rank0, T.rank1
    total = r0 + r1
    table: Table = {}
    for i, j in product(range(r0), repeat=2):
        table[(i, j)] = T.br00(T.e0(i), T.e0(j), L1).embed(0, total)
    for i, a in product(range(r0), range(r1)):
        table[(i, r0 + a)] = T.br01(T.e0(i), T.f1(a), L1).embed(r0, total)
        table[(r0 + a, i)] = T.br10(T.f1(a), T.e0(i), L1).embed(r0, total)
    for a, b in product(range(r1), repeat=2):
        table[(r0 + a, r0 + b)] = T.br01(T.d.column(a), T.f1(b), L1).embed(r0, total)
    lower_name, upper_name = f"{T.name}_0", f"{T.name}_1"
    algebra = LieConformalAlgebra(
        f"{lower_name}+{upper_name}", _joined_basis(T.basis0, T.basis1), table
    )
    return algebra, _block_diagonal(P.P0, P.P1)


def kernel_crossed_module(A: LieConformalAlgebra, P: ConformalMap) -> CrossedModule:
    """Kernel of the projection A x A -> A onto the first factor, included into A x A.

    A x A carries P + P and acts on the kernel (a copy of A) through its second factor.
    """
    n = A.rank
    lower = direct_product(A, A, f"{A.name}x{A.name}")
    upper = LieConformalAlgebra(f"{A.name}_ker", A.basis, dict(A.table))
    d = ConformalMap.block([[ConformalMap.zero(n, n)], [ConformalMap.identity(n)]])
    action = ConformalRep(lower, upper.basis, {(n + i, a): v for (i, a), v in A.table.items()})
    return CrossedModule(
        AveragingAlgebra(upper, P), AveragingAlgebra(lower, _block_diagonal(P, P)), d, action
    )
