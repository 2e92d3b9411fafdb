# tests/test_representations.py
import pytest

from core import builtins
from core.conformal import ConformalMap, check_averaging, check_jacobi, check_skew
from core.errors import ConstructionError, DimensionError
from core.representations import (
    AvgRepTriple,
    ConformalRep,
    adjoint_rep,
    check_avg_rep,
    check_embedding_tensor,
    check_rep,
    check_semidirect_operators,
    induced_rep,
    lift_embedding_tensor,
    semidirect,
    semidirect_operators,
    tensor_square_rep,
)
from core.symalg import D, ModElem, lam

L1 = lam(1)


class TestConformalRep:
    """Module axioms for conformal modules."""

    def test_adjoint_modules(self, vir, sl2):
        assert check_rep(adjoint_rep(vir)).passed
        assert check_rep(adjoint_rep(sl2)).passed

    def test_weight_one_module(self, vir):
        """C[d]h with L_l h = (d + l) h is a Virasoro module."""
        rep = ConformalRep(vir, ("H",), {(0, 0): ModElem((D + L1,))})
        assert check_rep(rep).passed

    def test_wrong_module(self, vir):
        """L_l h = h does not respect the bracket."""
        rep = ConformalRep(vir, ("H",), {(0, 0): ModElem.basis(1, 0)})
        report = check_rep(rep)
        assert not report.passed
        assert report.check("rep").basis_tuple == ["L", "L", "H"]

    def test_action_key_bounds(self, vir):
        with pytest.raises(DimensionError):
            ConformalRep(vir, ("H",), {(1, 0): ModElem.basis(1, 0)})

    def test_induced_rep(self, vir):
        rep = induced_rep(adjoint_rep(vir), builtins.scaled_identity(1, 3))
        assert rep.value(0, 0) == ModElem((3 * (D + 2 * L1),))


class TestAveragingModules:
    """rho(Px) phi(m) = phi(rho(Px) m) = phi(rho(x) phi(m))."""

    def test_scalar_triples(self, vir_triple, vir_triple_doubled, sl2_triple):
        for triple in (vir_triple, vir_triple_doubled, sl2_triple):
            assert check_avg_rep(triple).passed

    def test_mismatched_scalars(self, vir):
        """phi = 2 against P = 1 breaks the right-hand equality only."""
        triple = AvgRepTriple(adjoint_rep(vir), builtins.scaled_identity(1, 2), ConformalMap.identity(1))
        report = check_avg_rep(triple)
        assert report.check("avg-rep:left").passed
        assert not report.check("avg-rep:right").passed

    def test_triple_shapes(self, vir):
        with pytest.raises(DimensionError):
            AvgRepTriple(adjoint_rep(vir), ConformalMap.identity(2), ConformalMap.identity(1))


class TestSemidirect:
    """Semidirect sums and the three operators on them."""

    def test_semidirect_is_lie(self, vir):
        rep = ConformalRep(vir, ("H",), {(0, 0): ModElem((D + L1,))})
        algebra = semidirect(vir, rep)
        assert algebra.basis == ("L", "H")
        assert check_skew(algebra).passed
        assert check_jacobi(algebra).passed

    def test_colliding_names_get_suffix(self, vir):
        algebra = semidirect(vir, adjoint_rep(vir))
        assert algebra.basis == ("L", "L_M")

    def test_operators(self, vir_triple):
        first, second, third = semidirect_operators(vir_triple)
        assert first == ConformalMap.from_rows([[1, 0], [0, 0]])
        assert second == ConformalMap.from_rows([[0, 0], [0, 1]])
        assert third == ConformalMap.identity(2)

    def test_operator_checks(self, vir_triple):
        """The projection and the full operator average; phi alone does not here."""
        report = check_semidirect_operators(vir_triple)
        assert report.check("first:averaging").passed
        assert not report.check("second:averaging").passed
        assert report.check("third:averaging").passed


class TestEmbeddingTensor:
    def test_identity_on_adjoint(self, vir):
        rep = adjoint_rep(vir)
        T = ConformalMap.identity(1)
        assert check_embedding_tensor(vir, rep, T).passed
        algebra, operator = lift_embedding_tensor(vir, rep, T)
        assert operator == ConformalMap.from_rows([[0, 1], [0, 0]])
        assert check_averaging(algebra, operator).passed

    def test_scaled_tensor_fails(self, vir):
        """T = 2 scales both sides by 4; T = d breaks the identity."""
        rep = adjoint_rep(vir)
        assert check_embedding_tensor(vir, rep, builtins.scaled_identity(1, 2)).passed
        assert not check_embedding_tensor(vir, rep, ConformalMap.from_rows([[D]])).passed

    def test_shape(self, vir):
        with pytest.raises(DimensionError):
            check_embedding_tensor(vir, adjoint_rep(vir), ConformalMap.identity(2))


class TestTensorSquare:
    """The module A (x) A of a current algebra."""

    def test_module_axiom(self, sl2):
        triple = tensor_square_rep(sl2, ConformalMap.identity(3), "product")
        assert triple.rep.module_rank == 9
        assert triple.rep.module_basis[1] == "E_H"
        assert check_rep(triple.rep).passed

    def test_product_mode_averages(self):
        assert check_avg_rep(builtins.tensor2("product")).passed

    def test_sum_mode_breaks_right_identity(self):
        report = check_avg_rep(builtins.tensor2("sum"))
        assert not report.check("avg-rep:right").passed

    def test_needs_constant_bracket(self, vir):
        with pytest.raises(ConstructionError):
            tensor_square_rep(vir, ConformalMap.identity(1))

    def test_unknown_mode(self, sl2):
        with pytest.raises(ConstructionError):
            tensor_square_rep(sl2, ConformalMap.identity(3), "diagonal")
