# tests/test_symalg.py
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.errors import DegreeError, DimensionError
from core.symalg import (
    D,
    POLY_RING,
    ModElem,
    const,
    lam,
    max_lambda_index,
    mod_serialize,
    permutation_sign,
    poly_serialize,
    poly_subst,
    require_lambda_bound,
    sesquilinear_eval,
    tables_equal,
)
from utils.expr_parser import parse_module_element, parse_poly

L1, L2 = lam(1), lam(2)

small_ints = st.integers(min_value=-5, max_value=5)
monomials = st.tuples(
    st.integers(min_value=0, max_value=3),
    st.integers(min_value=0, max_value=2),
    st.integers(min_value=0, max_value=2),
)


@st.composite
def polys(draw):
    terms = draw(st.lists(st.tuples(monomials, small_ints, st.integers(1, 3)), max_size=4))
    p = POLY_RING.zero
    for (a, b, c), num, den in terms:
        p = p + const(num, den) * D**a * L1**b * L2**c
    return p


class TestPolynomials:
    """Exact polynomial arithmetic in D and the lambda variables."""

    def test_lambda_slots(self):
        """lam(k) is the k-th generator and rejects slots outside 1..9."""
        assert lam(1) == L1
        with pytest.raises(DegreeError):
            lam(0)
        with pytest.raises(DegreeError):
            lam(10)

    def test_substitution_is_simultaneous(self):
        """D -> L1 and L1 -> D swap the variables instead of collapsing them."""
        p = D + 2 * L1
        assert poly_subst(p, {D: L1, L1: D}) == L1 + 2 * D

    def test_max_lambda_index(self):
        """The largest lambda variable that occurs, 0 for D-only polynomials."""
        assert max_lambda_index(D**2 + 1) == 0
        assert max_lambda_index(D * L2 + L1) == 2

    def test_lambda_bound(self):
        """Values that mention a lambda beyond the bound are rejected."""
        require_lambda_bound(D + L1, 1, "value")
        with pytest.raises(DegreeError):
            require_lambda_bound(L2, 1, "value")

    def test_serialize_canonical(self):
        """Ascending graded order with explicit rationals."""
        assert poly_serialize(POLY_RING.zero) == "0"
        assert poly_serialize(2 * L1 + D) == "d + 2*l1"
        assert poly_serialize(const(1, 2) - D**2) == "1/2 - d^2"
        assert poly_serialize(-D) == "-d"

    @settings(max_examples=60, deadline=None)
    @given(polys())
    def test_serialize_parses_back(self, p):
        """Serialized text parses to the same polynomial."""
        assert parse_poly(poly_serialize(p)) == p


class TestModuleElements:
    """Free C[D]-module elements."""

    def test_rank_checks(self):
        """Arithmetic between different ranks is refused."""
        with pytest.raises(DimensionError):
            ModElem.basis(2, 0) + ModElem.basis(3, 0)
        with pytest.raises(DimensionError):
            ModElem.zero(0)

    def test_embed_and_block(self):
        """embed places coordinates at an offset and block cuts them out again."""
        v = ModElem((D, L1))
        wide = v.embed(1, 4)
        assert wide.coords == (0, D, L1, 0)
        assert wide.block(1, 3) == v
        with pytest.raises(DimensionError):
            v.embed(3, 4)

    def test_serialize_with_names(self):
        """Named serialization reads as an expression over the basis."""
        v = ModElem((D + 2 * L1, -POLY_RING.one, POLY_RING.zero))
        text = mod_serialize(v, ["L", "M", "N"])
        assert text == "(d + 2*l1)*L - M"
        assert parse_module_element(text, ["L", "M", "N"]) == v
        assert mod_serialize(ModElem.zero(2), ["A", "B"]) == "0"

    def test_serialize_without_names(self):
        assert mod_serialize(ModElem((D, POLY_RING.zero))) == "[d, 0]"

    @settings(max_examples=40, deadline=None)
    @given(polys(), polys())
    def test_named_serialization_parses_back(self, a, b):
        """Any element of a rank-2 module survives a trip through text."""
        v = ModElem((a, b))
        assert parse_module_element(mod_serialize(v, ["A", "B"]), ["A", "B"]) == v


class TestSesquilinearEvaluation:
    """Evaluation of basis tables at arbitrary arguments."""

    table = {(0, 0): ModElem((D + 2 * L1,))}

    def test_basis_arguments(self):
        """On basis vectors the table value comes back with lambda bound."""
        e = ModElem.basis(1, 0)
        assert sesquilinear_eval(self.table, 1, [e, e], [L1]) == ModElem((D + 2 * L1,))
        assert sesquilinear_eval(self.table, 1, [e, e], [L2]) == ModElem((D + 2 * L2,))

    def test_derivation_on_first_argument(self):
        """[D a_l b] = -l [a_l b]."""
        e = ModElem.basis(1, 0)
        value = sesquilinear_eval(self.table, 1, [ModElem((D,)), e], [L1])
        assert value == ModElem((-L1 * (D + 2 * L1),))

    def test_derivation_on_last_argument(self):
        """[a_l D b] = (D + l) [a_l b]."""
        e = ModElem.basis(1, 0)
        value = sesquilinear_eval(self.table, 1, [e, ModElem((D,))], [L1])
        assert value == ModElem(((D + L1) * (D + 2 * L1),))

    def test_lambda_count(self):
        e = ModElem.basis(1, 0)
        with pytest.raises(DegreeError):
            sesquilinear_eval(self.table, 1, [e, e], [])

    def test_zero_argument(self):
        e = ModElem.basis(1, 0)
        assert sesquilinear_eval(self.table, 1, [ModElem.zero(1), e], [L1]).is_zero()


class TestHelpers:
    def test_tables_equal_ignores_zero_entries(self):
        """Missing keys read as zero."""
        assert tables_equal({(0, 0): ModElem.zero(1)}, {})
        assert not tables_equal({(0, 0): ModElem.basis(1, 0)}, {})

    @pytest.mark.parametrize(
        "perm, sign",
        [((0, 1, 2), 1), ((1, 0, 2), -1), ((2, 0, 1), 1), ((2, 1, 0), -1)],
    )
    def test_permutation_sign(self, perm, sign):
        assert permutation_sign(perm) == sign
