# tests/test_homotopy2.py
import pytest

from core import builtins
from core.cohomology import Cochain, CochainPair, d_AL, delta, identity_cochain, skew_symmetrize
from core.conformal import ConformalMap, check_averaging, check_jacobi, check_skew
from core.errors import ConstructionError, DimensionError
from core.homotopy2 import (
    HomotopyAvg,
    TwoTermLInfinity,
    TwoTermMorphism,
    check_2term,
    check_crossed_module,
    check_homotopy_avg,
    check_morphism,
    classify,
    cocycle_to_skeletal,
    crossed_direct_sum,
    crossed_to_strict,
    identity_morphism,
    kernel_crossed_module,
    literal_form_checks,
    skeletal_equiv_check,
    skeletal_to_cocycle,
    strict_direct_sum,
    strict_to_crossed,
)
from core.representations import AvgRepTriple, adjoint_rep
from core.symalg import D, ModElem, lam

L1, L2 = lam(1), lam(2)


def _quadratic(A):
    raw = {(i, i): ModElem.basis(A.rank, i, L1**2) for i in range(A.rank)}
    return skew_symmetrize(raw, 2, adjoint_rep(A))


@pytest.fixture
def strict():
    return builtins.crossed_id_ad()


@pytest.fixture
def closed_pair(vir, vir_triple):
    """A nonzero closed degree-3 pair: the image of d_AL."""
    pair = CochainPair(_quadratic(vir), identity_cochain(vir))
    return d_AL(pair, vir_triple)


class TestStrictStructures:
    """The identity crossed module of Virasoro with P0 = P1 = 2."""

    def test_structure_and_operator(self, strict):
        T, P = strict
        assert check_2term(T).passed
        assert check_homotopy_avg(T, P).passed

    def test_classification(self, strict):
        assert classify(*strict) == ["strict"]

    def test_operator_must_commute_with_d(self, strict):
        """P0 = 2 against P1 = 1 breaks P0 d = d P1."""
        T, _ = strict
        P = HomotopyAvg(builtins.scaled_identity(1, 2), ConformalMap.identity(1))
        assert not check_homotopy_avg(T, P).check("operator-chain-map").passed

    def test_operator_shapes(self, strict):
        T, _ = strict
        with pytest.raises(DimensionError):
            check_homotopy_avg(T, HomotopyAvg(ConformalMap.identity(2), ConformalMap.identity(1)))

    def test_identity_morphism(self, strict):
        T, _ = strict
        assert check_morphism(T, T, identity_morphism(T)).passed

    def test_scaling_is_not_a_morphism(self, strict):
        T, _ = strict
        twice = builtins.scaled_identity(1, 2)
        report = check_morphism(T, T, TwoTermMorphism(twice, twice))
        assert report.check("morphism-chain-map").passed
        assert not report.check("morphism-bracket-homotopy").passed


class TestCrossedModules:
    """Strict structures correspond to crossed modules of averaging algebras."""

    def test_strict_to_crossed(self, strict):
        C = strict_to_crossed(*strict)
        assert C.upper.algebra.basis == ("M",)
        assert check_crossed_module(C).passed

    def test_round_trip(self, strict):
        T, P = strict
        T2, P2 = crossed_to_strict(strict_to_crossed(T, P))
        assert T2.name == T.name
        assert T2.d == T.d
        assert (P2.P0, P2.P1) == (P.P0, P.P1)
        assert check_2term(T2).passed
        assert check_homotopy_avg(T2, P2).passed

    @pytest.mark.parametrize("scale", [1, 3])
    def test_kernel_crossed_module(self, vir, scale):
        C = kernel_crossed_module(vir, builtins.scaled_identity(1, scale))
        assert C.lower.algebra.basis == ("L_1", "L_2")
        assert check_crossed_module(C).passed

    def test_direct_sums_agree(self, strict):
        """Both direct sums give a Lie conformal algebra with an averaging operator."""
        crossed = crossed_direct_sum(strict_to_crossed(*strict))
        direct = strict_direct_sum(*strict)
        for algebra, operator in (crossed, direct):
            assert algebra.basis == ("L", "M")
            assert check_skew(algebra).passed
            assert check_jacobi(algebra).passed
            assert check_averaging(algebra, operator).passed
        assert crossed[0].table == direct[0].table

    def test_non_strict_is_refused(self, vir_triple, closed_pair):
        T, P = cocycle_to_skeletal(vir_triple, closed_pair)
        with pytest.raises(ConstructionError):
            strict_to_crossed(T, P)
        with pytest.raises(ConstructionError):
            strict_direct_sum(T, P)


class TestSkeletal:
    """Skeletal structures and closed degree-3 pairs."""

    def test_zero_pair(self, vir, vir_triple):
        rep = adjoint_rep(vir)
        pair = CochainPair(Cochain.zero(rep, 3), Cochain.zero(rep, 2))
        T, P = cocycle_to_skeletal(vir_triple, pair)
        assert classify(T, P) == ["skeletal", "strict"]

    def test_closed_pair_gives_structure(self, vir_triple, closed_pair):
        T, P = cocycle_to_skeletal(vir_triple, closed_pair, "skel")
        assert classify(T, P) == ["skeletal"]
        assert check_2term(T).passed
        assert check_homotopy_avg(T, P).passed

    def test_round_trip(self, vir_triple, closed_pair):
        T, P = cocycle_to_skeletal(vir_triple, closed_pair)
        triple, pair = skeletal_to_cocycle(T, P)
        assert pair.f.values == closed_pair.f.values
        assert pair.g.values == closed_pair.g.values
        assert triple.phi == vir_triple.phi

    def test_degree_two_pair_is_refused(self, vir, vir_triple):
        pair = CochainPair(_quadratic(vir), identity_cochain(vir))
        with pytest.raises(ConstructionError):
            cocycle_to_skeletal(vir_triple, pair)

    def test_strict_is_not_skeletal(self, strict):
        with pytest.raises(ConstructionError):
            skeletal_to_cocycle(*strict)

    def test_equivalent_structures(self, vir, vir_triple):
        """Shifting the zero structure by d_AL(f, g) is witnessed by (f, g)."""
        rep = adjoint_rep(vir)
        zero = CochainPair(Cochain.zero(rep, 3), Cochain.zero(rep, 2))
        shifted = d_AL(CochainPair(_quadratic(vir), identity_cochain(vir)), vir_triple)
        T, P = cocycle_to_skeletal(vir_triple, zero)
        T2, P2 = cocycle_to_skeletal(vir_triple, shifted)
        module = T.module()
        f = Cochain(2, module, _quadratic(vir).values)
        g = Cochain(1, module, identity_cochain(vir).values)
        assert skeletal_equiv_check(T, P, T2, P2, f, g).passed
        assert skeletal_equiv_check(T2, P2, T, P, -f, -g).passed

    def test_equivalence_needs_equal_brackets(self, vir, vir_triple, strict):
        rep = adjoint_rep(vir)
        zero = CochainPair(Cochain.zero(rep, 3), Cochain.zero(rep, 2))
        T, P = cocycle_to_skeletal(vir_triple, zero)
        f, g = Cochain.zero(T.module(), 2), Cochain.zero(T.module(), 1)
        with pytest.raises(ConstructionError):
            skeletal_equiv_check(T, P, *strict, f, g)


def _two_term(basis0, basis1, d, bracket00=None, bracket01=None, l3=None):
    return TwoTermLInfinity("mutant", basis0, basis1, d, bracket00 or {}, bracket01 or {}, l3 or {})


def _skeletal(A, l3=None):
    """d = 0 over the adjoint module."""
    return _two_term(A.basis, A.basis, ConformalMap.zero(A.rank, A.rank), dict(A.table), dict(A.table), l3)


def _sl2_two_cochain(sl2):
    """h(E, F) = E, skew and constant."""
    e = ModElem.basis(3, 0)
    return Cochain(2, adjoint_rep(sl2), {(0, 2): e, (2, 0): -e})


def _failed(report):
    return [c.name for c in report.failed_checks()]


class TestStructureMutants:
    """Each structure below breaks exactly one identity of check_2term."""

    def test_upper_and_mixed_brackets_hold_by_construction(self, strict):
        T, _ = strict
        report = check_2term(T)
        for name in ("upper-bracket-zero", "mixed-skew"):
            assert report.check(name).passed
            assert "by construction" in report.check(name).detail

    def test_lower_skew(self):
        """[X_l X] = Y is not skew; every double bracket still vanishes."""
        y = ModElem.basis(2, 1)
        T = _two_term(("X", "Y"), ("M",), ConformalMap.zero(2, 1), {(0, 0): y})
        assert _failed(check_2term(T)) == ["lower-skew"]

    def test_d_equivariance(self, vir):
        """d = Id into Virasoro acting trivially on M."""
        T = _two_term(("L",), ("M",), ConformalMap.identity(1), dict(vir.table))
        assert _failed(check_2term(T)) == ["d-equivariance"]

    def test_d_symmetry(self):
        """d(M) = X and X acts on N only: [d(M)_l N] = N but [M_l d(N)] = 0."""
        T = _two_term(
            ("X",), ("M", "N"), ConformalMap.from_rows([[1, 0]]), {}, {(0, 1): ModElem.basis(2, 1)}
        )
        assert _failed(check_2term(T)) == ["d-symmetry"]

    def test_lower_jacobi(self):
        broken = builtins.broken_jacobi()
        T = _two_term(broken.basis, ("M",), ConformalMap.zero(3, 1), dict(broken.table))
        assert _failed(check_2term(T)) == ["lower-jacobi-homotopy"]

    def test_mixed_jacobi(self, vir):
        """L acting on M by a constant is not a module action."""
        T = _two_term(("L",), ("M",), ConformalMap.zero(1, 1), dict(vir.table), {(0, 0): ModElem.basis(1, 0)})
        assert _failed(check_2term(T)) == ["mixed-jacobi-homotopy"]

    def test_l3_closed(self):
        """A skew ternary bracket on the affine algebra [X_l Y] = Y that is not closed."""
        y = ModElem.basis(2, 1)
        lower = _two_term(("X", "Y"), ("M",), ConformalMap.zero(2, 1), {(0, 1): y, (1, 0): -y})
        raw = {(0, 0, 1): ModElem(((L1 - L2) * (D + L1 + L2) ** 2,))}
        l3 = skew_symmetrize(raw, 3, lower.module()).values
        assert l3
        T = _two_term(lower.basis0, lower.basis1, lower.d, lower.bracket00, {}, l3)
        assert _failed(check_2term(T)) == ["l3-closed"]


class TestOperatorMutants:
    """Each operator below breaks exactly one identity of check_homotopy_avg."""

    def test_chain_map(self, strict):
        T, _ = strict
        P = HomotopyAvg(builtins.scaled_identity(1, 2), ConformalMap.zero(1, 1))
        assert check_2term(T).passed
        assert _failed(check_homotopy_avg(T, P)) == ["operator-chain-map"]

    def test_homotopy(self, vir):
        """P0 = D on skeletal Virasoro: [Dx_l Dy] - D[Dx_l y] = -l^2 [x_l y]."""
        T = _skeletal(vir)
        P = HomotopyAvg(ConformalMap.from_rows([[D]]), ConformalMap.zero(1, 1))
        assert check_2term(T).passed
        assert _failed(check_homotopy_avg(T, P)) == ["operator-homotopy"]

    def test_left_and_right_d(self, vir):
        """P1 = 2 against P0 = 1 breaks the second form on both sides.

        With P2 skew and the L1 x L0 bracket derived from L0 x L1, the right
        identity is the left one at l -> -D - l, so the two fail together.
        """
        T = _skeletal(vir)
        P = HomotopyAvg(ConformalMap.identity(1), builtins.scaled_identity(1, 2))
        assert check_2term(T).passed
        assert _failed(check_homotopy_avg(T, P)) == ["operator-left-d:b", "operator-right-d:b"]

    def test_l3(self, sl2):
        """P = Id with a skew P2 that is not a cocycle: delta(P2)(H, E, F) = 2E."""
        T = _skeletal(sl2)
        P = HomotopyAvg(ConformalMap.identity(3), ConformalMap.identity(3), _sl2_two_cochain(sl2).values)
        assert check_2term(T).passed
        assert _failed(check_homotopy_avg(T, P)) == ["operator-l3"]


class TestMorphismMutants:
    """Each triple below breaks exactly one identity of check_morphism."""

    def test_chain_map(self, strict):
        T, _ = strict
        M = TwoTermMorphism(ConformalMap.identity(1), ConformalMap.zero(1, 1))
        assert _failed(check_morphism(T, T, M)) == ["morphism-chain-map"]

    def test_bracket_homotopy(self, vir):
        T = _skeletal(vir)
        M = TwoTermMorphism(builtins.scaled_identity(1, 2), ConformalMap.zero(1, 1))
        assert _failed(check_morphism(T, T, M)) == ["morphism-bracket-homotopy"]

    def test_left_and_right_d(self, vir):
        """f1 = D is not compatible with the action; the right identity mirrors the left."""
        T = _skeletal(vir)
        M = TwoTermMorphism(ConformalMap.identity(1), ConformalMap.from_rows([[D]]))
        assert _failed(check_morphism(T, T, M)) == ["morphism-left-d", "morphism-right-d"]

    def test_l3(self, sl2):
        """The identity between structures whose ternary brackets differ by delta(h)."""
        T = _skeletal(sl2)
        T2 = _skeletal(sl2, delta(_sl2_two_cochain(sl2)).values)
        assert _failed(check_morphism(T, T2, identity_morphism(T))) == ["morphism-l3"]


class TestLiteralForms:
    """The literal variants of the two l3 identities are reported apart."""

    def test_agree_on_strict_structures(self, strict):
        assert literal_form_checks(*strict).passed

    def test_disagree_on_a_closed_pair(self, sl2):
        thrice = builtins.scaled_identity(3, 3)
        triple = AvgRepTriple(adjoint_rep(sl2), thrice, thrice)
        h = _sl2_two_cochain(sl2)
        pair = d_AL(CochainPair(h, Cochain.zero(triple.rep, 1)), triple)
        T, P = cocycle_to_skeletal(triple, pair)
        assert check_2term(T).passed
        assert check_homotopy_avg(T, P).passed
        assert _failed(literal_form_checks(T, P)) == ["l3-closed:literal", "operator-l3:literal"]
