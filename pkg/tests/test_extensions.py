# tests/test_extensions.py
import pytest

from core.conformal import ConformalMap
from core.errors import ConstructionError, DimensionError
from core.extensions import (
    AutPair,
    NonAbCocycle,
    build_extension,
    check_aut_pair,
    check_cocycle,
    check_equivalence,
    check_ext_equivalence,
    check_extension,
    equivalence_map,
    extract_cocycle,
    pi_restrict,
    tau_solve_abelian,
    transform_cocycle,
    wells_verify,
    wells_witness,
)
from core.symalg import D, POLY_RING, ModElem, lam

L1 = lam(1)
COCYCLES = ["weight_one", "zero", "adjoint", "shifted", "shifted_zero"]


def _h(coeff):
    return ModElem((POLY_RING(coeff),))


class TestCocycles:
    """The defining identities of non-abelian cocycles."""

    @pytest.mark.parametrize("name", COCYCLES)
    def test_corpus_cocycles(self, corpus, name):
        assert check_cocycle(corpus.cocycles[name]).passed

    def test_constant_action_is_not_a_module(self, corpus):
        """L_l h = h does not respect the Virasoro bracket."""
        good = corpus.cocycles["zero"]
        bad = NonAbCocycle(good.base, good.fiber, {}, {(0, 0): _h(1)})
        report = check_cocycle(bad)
        assert not report.check("cocycle-rep").passed

    def test_phi_must_intertwine(self, corpus):
        """A constant Phi against the weight-one action breaks the operator identity on the base."""
        good = corpus.cocycles["weight_one"]
        bad = NonAbCocycle(good.base, good.fiber, good.chi, good.rho, ConformalMap.identity(1))
        report = check_cocycle(bad)
        assert report.check("operator-fiber:a").passed
        assert not report.check("operator-base").passed

    def test_shapes(self, corpus):
        good = corpus.cocycles["zero"]
        with pytest.raises(DimensionError):
            NonAbCocycle(good.base, good.fiber, {}, {(0, 1): _h(1)})
        with pytest.raises(DimensionError):
            NonAbCocycle(good.base, good.fiber, {}, {}, ConformalMap.identity(2))


class TestExtensions:
    """Building the total algebra and reading a cocycle back from a section."""

    @pytest.mark.parametrize("name", COCYCLES)
    def test_build_and_check(self, corpus, name):
        E = build_extension(corpus.cocycles[name])
        assert E.total.rank == E.base.rank + E.fiber.rank
        assert check_extension(E).passed

    @pytest.mark.parametrize("name", COCYCLES)
    def test_extract_recovers_cocycle(self, corpus, name):
        c = corpus.cocycles[name]
        assert extract_cocycle(build_extension(c)) == c

    def test_shifted_operator(self, corpus):
        """R = [[P, 0], [Phi, Q]] with P = 1, Phi = -1 and Q = 2."""
        E = build_extension(corpus.cocycles["shifted"])
        assert E.total.operator == ConformalMap.from_rows([[1, 0], [-1, 2]])
        assert E.total.algebra.basis == ("L", "H")

    def test_colliding_names(self, corpus):
        base = corpus.cocycles["zero"].base
        c = NonAbCocycle(base, base)
        assert build_extension(c).total.algebra.basis == ("L_L", "L_H")

    def test_non_cocycle_is_refused(self, corpus):
        good = corpus.cocycles["zero"]
        bad = NonAbCocycle(good.base, good.fiber, {}, {(0, 0): _h(1)})
        with pytest.raises(ConstructionError, match="cocycle-rep"):
            build_extension(bad)
        assert build_extension(bad, require_cocycle=False).total.rank == 2

    def test_other_section(self, corpus):
        """Moving the section by tau gives an equivalent cocycle."""
        c = corpus.cocycles["shifted"]
        E = build_extension(c)
        section = ConformalMap.from_rows([[1], [1]])
        moved = extract_cocycle(E, section)
        assert moved == corpus.cocycles["shifted_zero"]
        assert check_equivalence(c, moved, corpus.witnesses["shift"]).passed

    def test_section_must_split(self, corpus):
        E = build_extension(corpus.cocycles["zero"])
        with pytest.raises(ConstructionError):
            extract_cocycle(E, ConformalMap.from_rows([[2], [0]]))


class TestEquivalence:
    """Equivalent cocycles and the matching isomorphism of extensions."""

    def test_shifted_is_trivial(self, corpus):
        c, c2 = corpus.cocycles["shifted"], corpus.cocycles["shifted_zero"]
        tau = corpus.witnesses["shift"]
        assert check_equivalence(c, c2, tau).passed
        assert not check_equivalence(c, c2, ConformalMap.zero(1, 1)).passed

    def test_extension_isomorphism(self, corpus):
        c, c2 = corpus.cocycles["shifted"], corpus.cocycles["shifted_zero"]
        phi = equivalence_map(c, corpus.witnesses["shift"])
        assert phi == ConformalMap.from_rows([[1, 0], [-1, 1]])
        assert check_ext_equivalence(build_extension(c), build_extension(c2), phi).passed

    def test_identity_is_not_an_isomorphism(self, corpus):
        E = build_extension(corpus.cocycles["shifted"])
        E2 = build_extension(corpus.cocycles["shifted_zero"])
        report = check_ext_equivalence(E, E2, ConformalMap.identity(2))
        assert not report.passed
        assert report.check("commutes-inclusion").passed

    def test_different_fibers(self, corpus):
        with pytest.raises(DimensionError):
            check_equivalence(corpus.cocycles["zero"], corpus.cocycles["shifted_zero"], ConformalMap.zero(1, 1))

    def test_tau_shape(self, corpus):
        c = corpus.cocycles["shifted"]
        with pytest.raises(DimensionError):
            check_equivalence(c, c, ConformalMap.zero(2, 1))


class TestTauSearch:
    """Linear search for a witness over an abelian fiber."""

    def test_finds_witness(self, corpus):
        tau = tau_solve_abelian(corpus.cocycles["shifted"], corpus.cocycles["shifted_zero"], 3)
        assert tau == ConformalMap.from_rows([[-1]])

    def test_uses_configured_cap(self, corpus):
        tau = tau_solve_abelian(corpus.cocycles["shifted"], corpus.cocycles["shifted_zero"])
        assert tau == ConformalMap.from_rows([[-1]])

    def test_no_witness(self, corpus):
        """Different actions on an abelian fiber are never equivalent."""
        assert tau_solve_abelian(corpus.cocycles["zero"], corpus.cocycles["weight_one"], 3) is None

    def test_needs_abelian_fiber(self, corpus):
        c = corpus.cocycles["adjoint"]
        with pytest.raises(ConstructionError):
            tau_solve_abelian(c, c, 1)

    def test_negative_cap(self, corpus):
        c = corpus.cocycles["zero"]
        with pytest.raises(ConstructionError):
            tau_solve_abelian(c, c, -1)


class TestWells:
    """Automorphism pairs, their action on cocycles and inducibility."""

    @pytest.mark.parametrize("name", COCYCLES)
    def test_identity_pair(self, corpus, name):
        E = build_extension(corpus.cocycles[name])
        tau = ConformalMap.zero(E.fiber.rank, E.base.rank)
        assert wells_verify(corpus.aut_pairs["identity"], E, tau).passed

    @pytest.mark.parametrize("name", COCYCLES)
    def test_identity_pair_fixes_cocycles(self, corpus, name):
        c = corpus.cocycles[name]
        assert transform_cocycle(corpus.aut_pairs["identity"], c) == c

    def test_triple_fiber_on_shifted(self, corpus):
        """(3, 1) moves chi to 3 chi and Phi to -3; tau = -2 brings it back."""
        c = corpus.cocycles["shifted"]
        ap = corpus.aut_pairs["triple_fiber"]
        moved = transform_cocycle(ap, c)
        assert moved.phi == ConformalMap.from_rows([[-3]])
        assert moved.chi[(0, 0)] == _h(3 * (D + 2 * L1))
        report = wells_verify(ap, build_extension(c), corpus.witnesses["triple_fiber"])
        assert report.passed

    def test_wrong_witness(self, corpus):
        E = build_extension(corpus.cocycles["shifted"])
        report = wells_verify(corpus.aut_pairs["triple_fiber"], E, ConformalMap.zero(1, 1))
        assert not report.passed
        assert report.check("aut:alpha:invertible").passed

    def test_non_invertible_pair(self, corpus):
        E = build_extension(corpus.cocycles["zero"])
        ap = AutPair(ConformalMap.from_rows([[D]]), ConformalMap.identity(1))
        report = wells_verify(ap, E, ConformalMap.zero(1, 1))
        assert not report.check("aut:alpha:invertible").passed
        assert not report.check("wells").passed

    def test_aut_pair_shapes(self, corpus):
        c = corpus.cocycles["zero"]
        with pytest.raises(DimensionError):
            check_aut_pair(AutPair(ConformalMap.identity(2), ConformalMap.identity(1)), c.base, c.fiber)

    def test_witness_from_fiber_scaling(self, corpus):
        """diag(1, 3) on the semidirect extension restricts to (3, 1) with tau = 0."""
        E = build_extension(corpus.cocycles["weight_one"])
        gamma = ConformalMap.from_rows([[1, 0], [0, 3]])
        ap = pi_restrict(E, gamma)
        assert ap.alpha == ConformalMap.from_rows([[3]])
        assert ap.beta == ConformalMap.identity(1)
        ap, tau = wells_witness(E, gamma)
        assert tau.is_zero()
        assert wells_verify(ap, E, tau).passed

    def test_gamma_must_be_automorphism(self, corpus):
        E = build_extension(corpus.cocycles["weight_one"])
        with pytest.raises(ConstructionError):
            pi_restrict(E, ConformalMap.from_rows([[2, 0], [0, 1]]))
        with pytest.raises(ConstructionError):
            pi_restrict(E, ConformalMap.from_rows([[1, 0], [0, D]]))
