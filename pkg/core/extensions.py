# core/extensions.py
"""Non-abelian extensions of averaging Lie conformal algebras.

A cocycle (chi, rho, Phi) of the base L_P with values in the fiber H_Q builds the
algebra L + H with operator R(x, h) = (P x, Q h + Phi x); any section of an
extension gives back a cocycle. Automorphism pairs act on cocycles and the
Wells verifier decides inducibility given a witness.
"""
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional, Tuple

from sympy import Matrix, QQ, Rational

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
    map_equality_check,
    skew_table_check,
)
from core.errors import ConstructionError, DimensionError
from core.report import CheckBuilder, Report, single_check
from core.symalg import (
    D,
    POLY_RING,
    ModElem,
    Poly,
    Table,
    clean_table,
    require_lambda_bound,
    sesquilinear_eval,
)
from utils.config_loader import get_toolkit_settings
from utils.logger import logger


@dataclass(frozen=True)
class NonAbCocycle:
    """chi: L x L -> H, rho: L x H -> H and Phi: L -> H (an h x n map)."""

    base: AveragingAlgebra
    fiber: AveragingAlgebra
    chi: Table = field(default_factory=dict)
    rho: Table = field(default_factory=dict)
    Phi: Optional[ConformalMap] = None

    def __post_init__(self) -> None:
        n, h = self.base.rank, self.fiber.rank
        for what, table, ranks in (("chi", self.chi, (n, n)), ("rho", self.rho, (n, h))):
            for key, value in table.items():
                if len(key) != 2 or not all(0 <= k < r for k, r in zip(key, ranks)):
                    raise DimensionError(f"{what}: key {key} outside {ranks}")
                if value.rank != h:
                    raise DimensionError(f"{what}: value at {key} has rank {value.rank}, fiber has {h}")
                for coeff in value.coords:
                    require_lambda_bound(coeff, 1, f"{what} {key}")
            object.__setattr__(self, what, clean_table(table))
        if self.Phi is None:
            object.__setattr__(self, "Phi", ConformalMap.zero(h, n))
        elif (self.Phi.rows, self.Phi.cols) != (h, n):
            raise DimensionError(f"Phi must be {h}x{n}")

    @property
    def phi(self) -> ConformalMap:
        assert self.Phi is not None
        return self.Phi

    def chi_at(self, x: ModElem, y: ModElem, lam: Poly) -> ModElem:
        return sesquilinear_eval(self.chi, self.fiber.rank, [x, y], [lam])

    def act(self, x: ModElem, h: ModElem, lam: Poly) -> ModElem:
        return sesquilinear_eval(self.rho, self.fiber.rank, [x, h], [lam])

    def fiber_bracket(self, h: ModElem, k: ModElem, lam: Poly) -> ModElem:
        return bracket_at(self.fiber.algebra, h, k, lam)

    def base_bracket(self, x: ModElem, y: ModElem, lam: Poly) -> ModElem:
        return bracket_at(self.base.algebra, x, y, lam)


@dataclass(frozen=True)
class Extension:
    """The total averaging algebra with explicit inclusion, projection and section."""

    base: AveragingAlgebra
    fiber: AveragingAlgebra
    total: AveragingAlgebra
    inclusion: ConformalMap
    projection: ConformalMap
    section: ConformalMap

    def __post_init__(self) -> None:
        n, h, t = self.base.rank, self.fiber.rank, self.total.rank
        shapes = {
            "inclusion": (self.inclusion, (t, h)),
            "projection": (self.projection, (n, t)),
            "section": (self.section, (t, n)),
        }
        for what, (matrix, shape) in shapes.items():
            if (matrix.rows, matrix.cols) != shape:
                raise DimensionError(f"{what} must be {shape[0]}x{shape[1]}")


@dataclass(frozen=True)
class AutPair:
    """alpha on the fiber, beta on the base."""

    alpha: ConformalMap
    beta: ConformalMap


def _check_prerequisites(report: Report, label: str, avg: AveragingAlgebra) -> None:
    report.merge(check_skew(avg.algebra), prefix=label)
    report.merge(check_jacobi(avg.algebra), prefix=label)
    report.merge(check_averaging(avg.algebra, avg.operator), prefix=label)


def check_cocycle(c: NonAbCocycle) -> Report:
    """Base and fiber checks plus every identity the cocycle must satisfy."""
    L, H = c.base.algebra, c.fiber.algebra
    n, h = L.rank, H.rank
    P, Q, Phi = c.base.operator, c.fiber.operator, c.phi
    e = [L.basis_vector(i) for i in range(n)]
    f = [H.basis_vector(a) for a in range(h)]
    report = Report(subject=f"cocycle of {L.name} in {H.name}")
    _check_prerequisites(report, "base", c.base)
    _check_prerequisites(report, "fiber", c.fiber)
    report.add(skew_table_check("chi-skew", c.chi, L.basis, h, H.basis))

    rep_law = CheckBuilder("cocycle-rep", H.basis)
    for i, j, a in product(range(n), range(n), range(h)):
        lhs = c.act(e[i], c.act(e[j], f[a], L2), L1) - c.act(e[j], c.act(e[i], f[a], L1), L2)
        rhs = c.act(c.base_bracket(e[i], e[j], L1), f[a], L1 + L2) + c.fiber_bracket(
            c.chi_at(e[i], e[j], L1), f[a], L1 + L2
        )
        rep_law.compare((L.basis[i], L.basis[j], H.basis[a]), lhs, rhs)
    report.add(rep_law.result())

    closed = CheckBuilder("cocycle-chi", H.basis)
    for i, j, k in product(range(n), repeat=3):
        x, y, z = e[i], e[j], e[k]
        total = (
            c.act(x, c.chi_at(y, z, L2), L1)
            - c.act(y, c.chi_at(x, z, L1), L2)
            + c.act(z, c.chi_at(x, y, L1), -D - L1 - L2)
            + c.chi_at(x, c.base_bracket(y, z, L2), L1)
            - c.chi_at(y, c.base_bracket(x, z, L1), L2)
            - c.chi_at(c.base_bracket(x, y, L1), z, L1 + L2)
        )
        closed.compare((L.basis[i], L.basis[j], L.basis[k]), total, ModElem.zero(h))
    report.add(closed.result())

    derivation = CheckBuilder("rho-derivation", H.basis)
    for i, a, b in product(range(n), range(h), range(h)):
        lhs = c.act(e[i], c.fiber_bracket(f[a], f[b], L2), L1)
        rhs = c.fiber_bracket(c.act(e[i], f[a], L1), f[b], L1 + L2) + c.fiber_bracket(
            f[a], c.act(e[i], f[b], L1), L2
        )
        derivation.compare((L.basis[i], H.basis[a], H.basis[b]), lhs, rhs)
    report.add(derivation.result())

    fiber_a = CheckBuilder("operator-fiber:a", H.basis)
    fiber_b = CheckBuilder("operator-fiber:b", H.basis)
    for i, a in product(range(n), range(h)):
        px, phix, qh = P.column(i), Phi.column(i), Q.column(a)
        names = (L.basis[i], H.basis[a])
        shared = c.act(px, qh, L1) + c.fiber_bracket(phix, qh, L1)
        lhs = Q.apply(c.act(px, f[a], L1) + c.fiber_bracket(phix, f[a], L1))
        fiber_a.compare(names, lhs, shared)
        fiber_b.compare(names, Q.apply(c.act(e[i], qh, L1)), shared)
    report.add(fiber_a.result()).add(fiber_b.result())

    base_law = CheckBuilder("operator-base", H.basis)
    for i, j in product(range(n), repeat=2):
        px, py, phix, phiy = P.column(i), P.column(j), Phi.column(i), Phi.column(j)
        lhs = (
            Phi.apply(c.base_bracket(px, e[j], L1))
            + Q.apply(c.chi_at(px, e[j], L1))
            - Q.apply(c.act(e[j], phix, -D - L1))
        )
        rhs = (
            c.chi_at(px, py, L1)
            + c.act(px, phiy, L1)
            - c.act(py, phix, -D - L1)
            + c.fiber_bracket(phix, phiy, L1)
        )
        base_law.compare((L.basis[i], L.basis[j]), lhs, rhs)
    report.add(base_law.result())
    return report


def _canonical_maps(n: int, h: int) -> Tuple[ConformalMap, ConformalMap, ConformalMap]:
    inclusion = ConformalMap.block([[ConformalMap.zero(n, h)], [ConformalMap.identity(h)]])
    projection = ConformalMap.block([[ConformalMap.identity(n), ConformalMap.zero(n, h)]])
    section = ConformalMap.block([[ConformalMap.identity(n)], [ConformalMap.zero(h, n)]])
    return inclusion, projection, section


def _total_basis(L: LieConformalAlgebra, H: LieConformalAlgebra) -> Tuple[str, ...]:
    if set(L.basis) & set(H.basis):
        return tuple(f"{b}_L" for b in L.basis) + tuple(f"{b}_H" for b in H.basis)
    return L.basis + H.basis


def build_extension(c: NonAbCocycle, require_cocycle: bool = True) -> Extension:
    """([x_l y], rho(x)_l k - rho(y)_{-D-l} h + chi_l(x, y) + [h_l k]) with R = [[P, 0], [Phi, Q]]."""
    if require_cocycle:
        report = check_cocycle(c)
        if not report.passed:
            failed = ", ".join(check.name for check in report.failed_checks())
            raise ConstructionError(f"not a cocycle: {failed}")
    L, H = c.base.algebra, c.fiber.algebra
    n, h = L.rank, H.rank
    total = n + h
    table: Table = {}
    for key, value in L.table.items():
        table[key] = value.embed(0, total)
    for (i, j), value in c.chi.items():
        table[(i, j)] = table.get((i, j), ModElem.zero(total)) + value.embed(n, total)
    for (i, a), value in c.rho.items():
        table[(i, n + a)] = value.embed(n, total)
        table[(n + a, i)] = (-value.subst(FLIP)).embed(n, total)
    for (a, b), value in H.table.items():
        table[(n + a, n + b)] = value.embed(n, total)
    algebra = LieConformalAlgebra(f"{L.name}.{H.name}", _total_basis(L, H), table)
    operator = ConformalMap.block(
        [[c.base.operator, ConformalMap.zero(n, h)], [c.phi, c.fiber.operator]]
    )
    inclusion, projection, section = _canonical_maps(n, h)
    logger.debug(f"🔧 Built extension {algebra.name} of rank {total}")
    return Extension(c.base, c.fiber, AveragingAlgebra(algebra, operator), inclusion, projection, section)


def check_extension(E: Extension) -> Report:
    """The total averaging algebra plus the exactness data of i, p and s."""
    n, h = E.base.rank, E.fiber.rank
    report = Report(subject=E.total.name)
    _check_prerequisites(report, "total", E.total)
    L, H = E.base.algebra, E.fiber.algebra
    report.add(
        map_equality_check(
            "projection-kills-fiber", E.projection @ E.inclusion, ConformalMap.zero(n, h), H.basis, L.basis
        )
    )
    report.add(
        map_equality_check(
            "section-splits", E.projection @ E.section, ConformalMap.identity(n), L.basis, L.basis
        )
    )
    report.merge(check_avg_morphism(E.fiber, E.total, E.inclusion), prefix="inclusion")
    report.merge(check_avg_morphism(E.total, E.base, E.projection), prefix="projection")
    return report


class _Pullback:
    """Inverse of the inclusion on its image."""

    def __init__(self, E: Extension):
        self.E = E
        n, h = E.base.rank, E.fiber.rank
        self.n, self.h = n, h
        block = E.inclusion.submatrix(n, n + h, 0, h)
        try:
            self.inverse = block.inverse()
        except ConstructionError as exc:
            raise ConstructionError("inclusion is not invertible on the fiber block") from exc

    def __call__(self, v: ModElem, what: str) -> ModElem:
        if not self.E.projection.apply(v).is_zero():
            raise ConstructionError(f"{what}: value escapes fiber block")
        h_vec = self.inverse.apply(v.block(self.n, self.n + self.h))
        if self.E.inclusion.apply(h_vec) != v:
            raise ConstructionError(f"{what}: value escapes fiber block")
        return h_vec


def extract_cocycle(E: Extension, section: Optional[ConformalMap] = None) -> NonAbCocycle:
    """chi = [s x_l s y] - s[x_l y], rho(x)_l h = [s x_l h] and Phi = R s - s P."""
    s = E.section if section is None else section
    n, h = E.base.rank, E.fiber.rank
    if (s.rows, s.cols) != (E.total.rank, n):
        raise DimensionError(f"section must be {E.total.rank}x{n}")
    pull = _Pullback(E)
    if not (E.projection @ s == ConformalMap.identity(n)):
        raise ConstructionError("section does not split the projection")
    total, L = E.total.algebra, E.base.algebra
    chi: Table = {}
    rho: Table = {}
    for i, j in product(range(n), repeat=2):
        value = bracket_at(total, s.column(i), s.column(j), L1) - s.apply(L.structure(i, j))
        chi[(i, j)] = pull(value, f"chi({L.basis[i]}, {L.basis[j]})")
    for i, a in product(range(n), range(h)):
        value = bracket_at(total, s.column(i), E.inclusion.column(a), L1)
        rho[(i, a)] = pull(value, f"rho({L.basis[i]})")
    columns = []
    for i in range(n):
        value = E.total.operator.apply(s.column(i)) - s.apply(E.base.operator.column(i))
        columns.append(pull(value, f"Phi({L.basis[i]})"))
    return NonAbCocycle(E.base, E.fiber, chi, rho, ConformalMap.from_columns(columns))


def _require_same_spaces(c: NonAbCocycle, c2: NonAbCocycle) -> None:
    if c.base != c2.base or c.fiber != c2.fiber:
        raise DimensionError("cocycles live over different base or fiber algebras")


def _equivalence_residuals(
    c: NonAbCocycle, c2: NonAbCocycle, tau: ConformalMap
) -> Dict[str, List[Tuple[Tuple[str, ...], ModElem, ModElem]]]:
    """Both sides of the three equivalence identities on every basis tuple."""
    L, H = c.base.algebra, c.fiber.algebra
    n, h = L.rank, H.rank
    if (tau.rows, tau.cols) != (h, n):
        raise DimensionError(f"tau must be {h}x{n}")
    e = [L.basis_vector(i) for i in range(n)]
    f = [H.basis_vector(a) for a in range(h)]
    sides: Dict[str, List[Tuple[Tuple[str, ...], ModElem, ModElem]]] = {
        "equivalence-rho": [],
        "equivalence-chi": [],
        "equivalence-Phi": [],
    }
    for i, a in product(range(n), range(h)):
        lhs = c.act(e[i], f[a], L1) - c2.act(e[i], f[a], L1)
        rhs = c.fiber_bracket(tau.column(i), f[a], L1)
        sides["equivalence-rho"].append(((L.basis[i], H.basis[a]), lhs, rhs))
    for i, j in product(range(n), repeat=2):
        tx, ty = tau.column(i), tau.column(j)
        lhs = c.chi_at(e[i], e[j], L1) - c2.chi_at(e[i], e[j], L1)
        rhs = (
            c2.act(e[i], ty, L1)
            - c2.act(e[j], tx, -D - L1)
            + c.fiber_bracket(tx, ty, L1)
            - tau.apply(c.base_bracket(e[i], e[j], L1))
        )
        sides["equivalence-chi"].append(((L.basis[i], L.basis[j]), lhs, rhs))
    difference = c.phi - c2.phi
    shifted = c.fiber.operator @ tau - tau @ c.base.operator
    for i in range(n):
        sides["equivalence-Phi"].append(((L.basis[i],), difference.column(i), shifted.column(i)))
    return sides


def check_equivalence(c: NonAbCocycle, c2: NonAbCocycle, tau: ConformalMap) -> Report:
    """c2 is the cocycle of the section s - tau whenever c is the one of s."""
    _require_same_spaces(c, c2)
    report = Report(subject=f"cocycle equivalence over {c.base.name}")
    for name, rows in _equivalence_residuals(c, c2, tau).items():
        builder = CheckBuilder(name, c.fiber.algebra.basis)
        for names, lhs, rhs in rows:
            builder.compare(names, lhs, rhs)
        report.add(builder.result())
    return report


def equivalence_map(c: NonAbCocycle, tau: ConformalMap) -> ConformalMap:
    """(x, h) -> (x, h + tau x)."""
    n, h = c.base.rank, c.fiber.rank
    return ConformalMap.block(
        [[ConformalMap.identity(n), ConformalMap.zero(n, h)], [tau, ConformalMap.identity(h)]]
    )


def check_ext_equivalence(E: Extension, E2: Extension, phi: ConformalMap) -> Report:
    """phi is a morphism of averaging algebras commuting with both inclusions and projections."""
    report = Report(subject=f"{E.total.name} -> {E2.total.name}")
    report.merge(check_avg_morphism(E.total, E2.total, phi), prefix="map")
    report.add(
        map_equality_check(
            "commutes-inclusion", phi @ E.inclusion, E2.inclusion, E.fiber.algebra.basis, E2.total.algebra.basis
        )
    )
    report.add(
        map_equality_check(
            "commutes-projection", E2.projection @ phi, E.projection, E.total.algebra.basis, E.base.algebra.basis
        )
    )
    return report


def check_aut_pair(ap: AutPair, base: AveragingAlgebra, fiber: AveragingAlgebra) -> Report:
    """Both maps are invertible over C[D], preserve brackets and commute with the operators."""
    report = Report(subject=f"automorphisms of {fiber.name} and {base.name}")
    for label, matrix, avg in (("alpha", ap.alpha, fiber), ("beta", ap.beta, base)):
        if (matrix.rows, matrix.cols) != (avg.rank, avg.rank):
            raise DimensionError(f"{label} must be {avg.rank}x{avg.rank}")
        invertible = matrix.is_invertible()
        report.add(
            single_check(f"{label}:invertible", invertible, None if invertible else "determinant is not a nonzero constant")
        )
        report.merge(check_avg_morphism(avg, avg, matrix), prefix=label)
    return report


def invert_aut_pair(ap: AutPair) -> AutPair:
    return AutPair(ap.alpha.inverse(), ap.beta.inverse())


def transform_cocycle(ap: AutPair, c: NonAbCocycle) -> NonAbCocycle:
    """chi(b^-1 x, b^-1 y), rho(b^-1 x) a^-1 and Phi b^-1, all followed by alpha."""
    inverse = invert_aut_pair(ap)
    alpha, beta_inv, alpha_inv = ap.alpha, inverse.beta, inverse.alpha
    n, h = c.base.rank, c.fiber.rank
    chi = {
        (i, j): alpha.apply(c.chi_at(beta_inv.column(i), beta_inv.column(j), L1))
        for i, j in product(range(n), repeat=2)
    }
    rho = {
        (i, a): alpha.apply(c.act(beta_inv.column(i), alpha_inv.column(a), L1))
        for i, a in product(range(n), range(h))
    }
    return NonAbCocycle(c.base, c.fiber, chi, rho, alpha @ c.phi @ beta_inv)


def wells_verify(ap: AutPair, E: Extension, tau: ConformalMap) -> Report:
    """tau witnesses that the transformed cocycle is equivalent to the original one."""
    c = extract_cocycle(E)
    report = Report(subject=f"Wells class on {E.total.name}")
    report.merge(check_aut_pair(ap, E.base, E.fiber), prefix="aut")
    if not (ap.alpha.is_invertible() and ap.beta.is_invertible()):
        report.add(single_check("wells", False, "pair is not invertible"))
        return report
    report.merge(check_equivalence(transform_cocycle(ap, c), c, tau), prefix="wells")
    return report


def pi_restrict(E: Extension, gamma: ConformalMap) -> AutPair:
    """(gamma on the fiber, p gamma s) for an automorphism preserving the fiber."""
    t = E.total.rank
    if (gamma.rows, gamma.cols) != (t, t):
        raise DimensionError(f"gamma must be {t}x{t}")
    if not gamma.is_invertible():
        raise ConstructionError("gamma is not invertible over C[d]")
    if not check_avg_morphism(E.total, E.total, gamma).passed:
        raise ConstructionError("gamma is not an automorphism of the averaging algebra")
    if not (E.projection @ gamma @ E.inclusion).is_zero():
        raise ConstructionError("gamma does not preserve the fiber")
    pull = _Pullback(E)
    image = gamma @ E.inclusion
    alpha = ConformalMap.from_columns(
        [pull(image.column(a), "gamma on the fiber") for a in range(E.fiber.rank)]
    )
    return AutPair(alpha, E.projection @ gamma @ E.section)


def wells_witness(E: Extension, gamma: ConformalMap) -> Tuple[AutPair, ConformalMap]:
    """The pair induced by gamma and tau = gamma s beta^-1 - s pulled back to the fiber."""
    ap = pi_restrict(E, gamma)
    moved = gamma @ E.section @ ap.beta.inverse() - E.section
    pull = _Pullback(E)
    tau = ConformalMap.from_columns(
        [pull(moved.column(i), "section shift") for i in range(E.base.rank)]
    )
    return ap, tau


def _residual_vector(c: NonAbCocycle, c2: NonAbCocycle, tau: ConformalMap) -> Dict[Tuple[object, ...], object]:
    out: Dict[Tuple[object, ...], object] = {}
    for name, rows in _equivalence_residuals(c, c2, tau).items():
        for names, lhs, rhs in rows:
            for k, coeff in enumerate((lhs - rhs).coords):
                for monom, value in coeff.items():
                    out[(name, names, k, monom)] = value
    return out


def tau_solve_abelian(
    c: NonAbCocycle, c2: NonAbCocycle, degree_cap: Optional[int] = None
) -> Optional[ConformalMap]:
    """Search tau with entries of D-degree <= degree_cap; None when no witness exists within the cap."""
    _require_same_spaces(c, c2)
    if c.fiber.algebra.table:
        raise ConstructionError("tau search needs an abelian fiber")
    cap = int(get_toolkit_settings()["default_tau_cap"]) if degree_cap is None else degree_cap
    if cap < 0:
        raise ConstructionError(f"degree cap must be >= 0, got {cap}")
    n, h = c.base.rank, c.fiber.rank
    unknowns = [(r, col, k) for r in range(h) for col in range(n) for k in range(cap + 1)]

    def unit(r: int, col: int, k: int) -> ConformalMap:
        rows = [[POLY_RING.zero] * n for _ in range(h)]
        rows[r][col] = D**k
        return ConformalMap.from_rows(rows)

    zero_tau = ConformalMap.zero(h, n)
    base = _residual_vector(c, c2, zero_tau)
    columns = []
    for r, col, k in unknowns:
        shifted = _residual_vector(c, c2, unit(r, col, k))
        columns.append({key: shifted.get(key, 0) - base.get(key, 0) for key in set(shifted) | set(base)})
    keys = sorted(set(base).union(*[set(column) for column in columns]), key=repr)
    logger.debug(f"🔍 tau search: {len(unknowns)} unknowns, {len(keys)} equations")
    if not keys:
        return zero_tau

    system = Matrix(
        len(keys), len(unknowns), lambda row, j: QQ.to_sympy(QQ.convert(columns[j].get(keys[row], 0)))
    )
    rhs = Matrix(len(keys), 1, lambda row, _: -QQ.to_sympy(QQ.convert(base.get(keys[row], 0))))
    try:
        solution, params = system.gauss_jordan_solve(rhs)
    except ValueError:
        logger.info("ℹ️ No tau within the degree cap")
        return None
    solution = solution.subs({symbol: 0 for symbol in params})

    rows = [[POLY_RING.zero] * n for _ in range(h)]
    for (r, col, k), value in zip(unknowns, solution):
        rational = Rational(value)
        rows[r][col] = rows[r][col] + POLY_RING(QQ(int(rational.p), int(rational.q))) * D**k
    tau = ConformalMap.from_rows(rows)
    if not check_equivalence(c, c2, tau).passed:
        logger.warning("⚠️ Solved tau failed verification")
        return None
    return tau
