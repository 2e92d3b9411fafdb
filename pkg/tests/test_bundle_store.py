# tests/test_bundle_store.py
import json

import pytest

from bundles.bundle_store import dump_bundle, load_bundle, loads_bundle, save_bundle
from bundles.library import builtin_bundle, builtin_names
from core.cohomology import check_cochain
from core.conformal import AssocConformalAlgebra, ConformalMap
from core.errors import ExprSyntaxError, SchemaError
from core.symalg import D, ModElem, const, lam

L1 = lam(1)
CORPUS_FILES = [
    "abelian_2",
    "broken_jacobi",
    "broken_skew",
    "cocycles",
    "crossed_id_ad",
    "cur_sl2",
    "vir_sum2",
    "vir_sum3",
    "virasoro",
]


class TestLoading:
    """Reading bundle documents from text and files."""

    @pytest.mark.parametrize("name", CORPUS_FILES)
    def test_corpus_files_load(self, corpus_dir, name):
        bundle = load_bundle(str(corpus_dir / f"{name}.json"))
        assert bundle.algebras
        assert bundle.source.endswith(f"{name}.json")

    def test_singular_keys_fold_into_default(self, virasoro_bundle):
        bundle = loads_bundle(json.dumps(virasoro_bundle))
        algebra = bundle.lie_algebra()
        assert algebra.basis == ("L",)
        assert algebra.structure(0, 0) == ModElem((D + 2 * L1,))
        assert bundle.operators["default"] == ConformalMap.identity(1)
        assert bundle.maps["Deriv"] == ConformalMap.from_rows([[D]])

    def test_coordinate_values(self, virasoro_bundle):
        virasoro_bundle["algebra"]["bracket"] = {"L,L": ["d + 2*l1"]}
        bundle = loads_bundle(json.dumps(virasoro_bundle))
        assert bundle.lie_algebra().structure(0, 0) == ModElem((D + 2 * L1,))

    def test_map_references(self, virasoro_bundle):
        """An operator may name an entry of maps."""
        virasoro_bundle["algebra"]["operator"] = "Twice"
        bundle = loads_bundle(json.dumps(virasoro_bundle))
        assert bundle.averaging().operator == ConformalMap.scalar(1, 2)

    def test_corpus_cochains_are_skew(self, corpus_dir):
        bundle = load_bundle(str(corpus_dir / "virasoro.json"))
        assert bundle.cochains["quadratic"].degree == 2
        assert bundle.cochains["cubic"].degree == 3
        assert bundle.pairs["eta_id"].degree == 2
        for name in ("quadratic", "cubic"):
            assert check_cochain(bundle.cochains[name]).passed

    def test_symmetrize_flag(self, virasoro_bundle):
        """Only the skew part of the given values is kept."""
        virasoro_bundle["cochains"] = {"quadratic": {"degree": 2, "symmetrize": True, "values": {"L,L": "l1^2*L"}}}
        bundle = loads_bundle(json.dumps(virasoro_bundle))
        expected = ModElem((-const(1, 2) * D**2 - D * L1,))
        assert bundle.cochains["quadratic"].values == {(0, 0): expected}

    def test_associative_kind(self):
        bundle = builtin_bundle("mat2")
        assert isinstance(bundle.algebras["default"], AssocConformalAlgebra)
        with pytest.raises(SchemaError):
            bundle.lie_algebra()


class TestSchemaErrors:
    """Every malformed document fails with a path to the offending key."""

    def test_unknown_key(self, corpus_dir):
        with pytest.raises(SchemaError) as exc:
            load_bundle(str(corpus_dir / "bad_schema.json"))
        assert exc.value.path == "algebra.colour"

    def test_expression_error(self, corpus_dir):
        with pytest.raises(ExprSyntaxError) as exc:
            load_bundle(str(corpus_dir / "bad_expr.json"))
        assert "at byte" in str(exc.value)

    def test_missing_format(self, virasoro_bundle):
        del virasoro_bundle["format"]
        with pytest.raises(SchemaError) as exc:
            loads_bundle(json.dumps(virasoro_bundle))
        assert exc.value.path == "format"

    def test_not_an_object(self):
        with pytest.raises(SchemaError):
            loads_bundle("[1, 2]")

    def test_singular_and_plural_default(self, virasoro_bundle):
        virasoro_bundle["algebras"] = {"default": virasoro_bundle["algebra"]}
        with pytest.raises(SchemaError):
            loads_bundle(json.dumps(virasoro_bundle))

    def test_unknown_basis_element(self, virasoro_bundle):
        virasoro_bundle["algebra"]["bracket"] = {"L,M": "L"}
        with pytest.raises(SchemaError) as exc:
            loads_bundle(json.dumps(virasoro_bundle))
        assert exc.value.path == "algebras.default.bracket.L,M"

    def test_unknown_map(self, virasoro_bundle):
        virasoro_bundle["algebra"]["operator"] = "Thrice"
        with pytest.raises(SchemaError) as exc:
            loads_bundle(json.dumps(virasoro_bundle))
        assert exc.value.path == "algebras.default.operator"

    def test_ragged_map(self, virasoro_bundle):
        virasoro_bundle["maps"]["Ragged"] = [["1", "0"], ["1"]]
        with pytest.raises(SchemaError) as exc:
            loads_bundle(json.dumps(virasoro_bundle))
        assert exc.value.path == "maps.Ragged"

    def test_phi_without_operator(self, virasoro_bundle):
        virasoro_bundle["rep"] = {
            "algebra": "default",
            "module_basis": ["L"],
            "action": {"L,L": "(d + 2*l1)*L"},
            "phi": [["1"]],
        }
        with pytest.raises(SchemaError) as exc:
            loads_bundle(json.dumps(virasoro_bundle))
        assert exc.value.path == "reps.default"

    def test_get_names_the_collection(self, virasoro_bundle):
        bundle = loads_bundle(json.dumps(virasoro_bundle))
        with pytest.raises(SchemaError) as exc:
            bundle.get("cochains", "eta")
        assert exc.value.path == "cochains.eta"

    def test_unknown_builtin(self):
        with pytest.raises(SchemaError):
            builtin_bundle("heisenberg")


class TestWriting:
    """Canonical output of bundles."""

    @pytest.mark.parametrize("name", builtin_names())
    def test_dump_is_stable(self, name):
        """Loading the canonical text and dumping it again changes nothing."""
        text = dump_bundle(builtin_bundle(name))
        assert dump_bundle(loads_bundle(text)) == text

    def test_canonical_layout(self):
        text = dump_bundle(builtin_bundle("virasoro"))
        assert text.endswith("}\n")
        data = json.loads(text)
        assert data["format"] == 1
        assert "algebra" in data and "algebras" not in data
        assert data["algebra"]["bracket"] == {"L,L": "(d + 2*l1)*L"}

    def test_configured_indent(self, tmp_path, monkeypatch):
        config = tmp_path / "lca.json"
        config.write_text(json.dumps({"toolkit": {"json_indent": 4}}))
        monkeypatch.setenv("LCA_CONFIG", str(config))
        text = dump_bundle(builtin_bundle("virasoro"))
        assert '\n    "algebra"' in text

    @pytest.mark.parametrize("name", CORPUS_FILES)
    def test_corpus_files_are_canonical(self, corpus_dir, name):
        path = corpus_dir / f"{name}.json"
        assert dump_bundle(load_bundle(str(path))) == path.read_text(encoding="utf-8")

    def test_extension_written_by_cocycle(self):
        data = json.loads(dump_bundle(builtin_bundle("cocycles")))
        assert data["extensions"]["semidirect"] == {"cocycle": "weight_one"}
        assert "total" not in json.dumps(data["extensions"])

    def test_save_and_load(self, tmp_path):
        path = tmp_path / "cocycles.json"
        bundle = builtin_bundle("cocycles")
        save_bundle(bundle, str(path))
        again = load_bundle(str(path))
        assert set(again.cocycles) == set(bundle.cocycles)
        assert dump_bundle(again) == path.read_text(encoding="utf-8")
