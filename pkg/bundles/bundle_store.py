# bundles/bundle_store.py
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import ValidationError

from core.cohomology import Cochain, CochainPair, skew_symmetrize
from core.conformal import (
    AssocConformalAlgebra,
    AveragingAlgebra,
    ConformalAlgebra,
    ConformalMap,
    LieConformalAlgebra,
)
from core.errors import SchemaError
from core.extensions import AutPair, Extension, NonAbCocycle, build_extension
from core.homotopy2 import CrossedModule, HomotopyAvg, TwoTermLInfinity, TwoTermMorphism
from core.representations import AvgRepTriple, ConformalRep, adjoint_rep
from core.symalg import ModElem, Table, mod_serialize, poly_serialize
from bundles.schema import SINGULAR_KEYS, BundleSpec, MapRef, TableSpec, ValueSpec
from utils.config_loader import get_toolkit_settings
from utils.expr_parser import parse_coordinates, parse_module_element, parse_poly
from utils.logger import logger

FORMAT_VERSION = 1


@dataclass(frozen=True)
class MorphismEntry:
    """A two-term morphism between the named two-term structures."""

    source: str
    target: str
    morphism: TwoTermMorphism


@dataclass
class Bundle:
    """Every structure of one bundle document, constructed and cross-validated."""

    source: str = "<memory>"
    algebras: Dict[str, ConformalAlgebra] = field(default_factory=dict)
    operators: Dict[str, ConformalMap] = field(default_factory=dict)
    maps: Dict[str, ConformalMap] = field(default_factory=dict)
    reps: Dict[str, ConformalRep] = field(default_factory=dict)
    triples: Dict[str, AvgRepTriple] = field(default_factory=dict)
    cochains: Dict[str, Cochain] = field(default_factory=dict)
    pairs: Dict[str, CochainPair] = field(default_factory=dict)
    two_terms: Dict[str, Tuple[TwoTermLInfinity, HomotopyAvg]] = field(default_factory=dict)
    morphisms: Dict[str, MorphismEntry] = field(default_factory=dict)
    crossed_modules: Dict[str, CrossedModule] = field(default_factory=dict)
    cocycles: Dict[str, NonAbCocycle] = field(default_factory=dict)
    extensions: Dict[str, Extension] = field(default_factory=dict)
    aut_pairs: Dict[str, AutPair] = field(default_factory=dict)

    def get(self, collection: str, name: str) -> Any:
        entries = getattr(self, collection)
        if name not in entries:
            available = ", ".join(sorted(entries)) or "none"
            raise SchemaError(f"no entry named {name!r} (available: {available})", f"{collection}.{name}")
        return entries[name]

    def lie_algebra(self, name: str = "default") -> LieConformalAlgebra:
        algebra = self.get("algebras", name)
        if not isinstance(algebra, LieConformalAlgebra):
            raise SchemaError("expected a Lie conformal algebra", f"algebras.{name}.kind")
        return algebra

    def averaging(self, name: str = "default") -> AveragingAlgebra:
        algebra = self.lie_algebra(name)
        if name not in self.operators:
            raise SchemaError("algebra has no operator", f"algebras.{name}.operator")
        return AveragingAlgebra(algebra, self.operators[name])


def _split_key(key: str, name_lists: Sequence[Sequence[str]], path: str) -> Tuple[int, ...]:
    parts = [part.strip() for part in key.split(",")]
    if len(parts) != len(name_lists):
        raise SchemaError(f"key {key!r} needs {len(name_lists)} comma-separated entries", path)
    indices = []
    for part, names in zip(parts, name_lists):
        if part in names:
            indices.append(list(names).index(part))
        elif part.isdigit() and int(part) < len(names):
            indices.append(int(part))
        else:
            raise SchemaError(f"unknown basis element {part!r} in key {key!r}", path)
    return tuple(indices)


def _value(spec: ValueSpec, basis: Sequence[str], path: str) -> ModElem:
    if isinstance(spec, str):
        return parse_module_element(spec, basis)
    if len(spec) != len(basis):
        raise SchemaError(f"coordinate list of length {len(spec)} for rank {len(basis)}", path)
    return parse_coordinates(spec)


def _table(spec: TableSpec, name_lists: Sequence[Sequence[str]], target: Sequence[str], path: str) -> Table:
    table: Table = {}
    for key, value in spec.items():
        entry_path = f"{path}.{key}"
        index = _split_key(key, name_lists, entry_path)
        if index in table:
            raise SchemaError(f"duplicate key {key!r}", entry_path)
        table[index] = _value(value, target, entry_path)
    return table


class BundleLoader:
    """Builds a Bundle from a validated BundleSpec, collection by collection."""

    def __init__(self, spec: BundleSpec, source: str):
        self.spec = spec
        self.bundle = Bundle(source=source)

    def _map(self, ref: MapRef, path: str) -> ConformalMap:
        if isinstance(ref, str):
            if ref not in self.bundle.maps:
                raise SchemaError(f"unknown map {ref!r}", path)
            return self.bundle.maps[ref]
        if not ref or not ref[0]:
            raise SchemaError("a map needs at least one row and one column", path)
        if any(len(row) != len(ref[0]) for row in ref):
            raise SchemaError("map rows have different lengths", path)
        return ConformalMap.from_rows([[parse_poly(entry) for entry in row] for row in ref])

    def _averaging(self, name: str, path: str) -> AveragingAlgebra:
        if name not in self.bundle.algebras:
            raise SchemaError(f"unknown algebra {name!r}", path)
        return self.bundle.averaging(name)

    def load(self) -> Bundle:
        spec, bundle = self.spec, self.bundle
        for name, rows in spec.maps.items():
            bundle.maps[name] = self._map(rows, f"maps.{name}")

        for name, algebra_spec in spec.algebras.items():
            path = f"algebras.{name}"
            basis = algebra_spec.basis
            table = _table(algebra_spec.bracket, [basis, basis], basis, f"{path}.bracket")
            cls = AssocConformalAlgebra if algebra_spec.kind == "assoc" else LieConformalAlgebra
            bundle.algebras[name] = cls(algebra_spec.name or name, tuple(basis), table)
            if algebra_spec.operator is not None:
                bundle.operators[name] = self._map(algebra_spec.operator, f"{path}.operator")

        for name, rep_spec in spec.reps.items():
            path = f"reps.{name}"
            if rep_spec.algebra not in bundle.algebras:
                raise SchemaError(f"unknown algebra {rep_spec.algebra!r}", f"{path}.algebra")
            algebra = bundle.lie_algebra(rep_spec.algebra)
            module = rep_spec.module_basis
            action = _table(rep_spec.action, [algebra.basis, module], module, f"{path}.action")
            rep = ConformalRep(algebra, tuple(module), action)
            bundle.reps[name] = rep
            if (rep_spec.phi is None) != (rep_spec.operator is None):
                raise SchemaError("'phi' and 'operator' come together", path)
            if rep_spec.phi is not None and rep_spec.operator is not None:
                bundle.triples[name] = AvgRepTriple(
                    rep, self._map(rep_spec.phi, f"{path}.phi"), self._map(rep_spec.operator, f"{path}.operator")
                )

        for name, cochain_spec in spec.cochains.items():
            path = f"cochains.{name}"
            if cochain_spec.rep is not None:
                rep = bundle.get("reps", cochain_spec.rep)
            else:
                algebra_name = cochain_spec.algebra or "default"
                if algebra_name not in bundle.algebras:
                    raise SchemaError(f"unknown algebra {algebra_name!r}", f"{path}.algebra")
                rep = adjoint_rep(bundle.lie_algebra(algebra_name))
            names = [rep.algebra.basis] * cochain_spec.degree
            values = _table(cochain_spec.values, names, rep.module_basis, f"{path}.values")
            bundle.cochains[name] = (
                skew_symmetrize(values, cochain_spec.degree, rep)
                if cochain_spec.symmetrize
                else Cochain(cochain_spec.degree, rep, values)
            )

        for name, pair_spec in spec.pairs.items():
            bundle.pairs[name] = CochainPair(
                bundle.get("cochains", pair_spec.f), bundle.get("cochains", pair_spec.g)
            )

        for name, tt in spec.two_terms.items():
            path = f"two_terms.{name}"
            b0, b1 = tt.basis0, tt.basis1
            T = TwoTermLInfinity(
                tt.name or name,
                tuple(b0),
                tuple(b1),
                self._map(tt.d, f"{path}.d"),
                _table(tt.bracket00, [b0, b0], b0, f"{path}.bracket00"),
                _table(tt.bracket01, [b0, b1], b1, f"{path}.bracket01"),
                _table(tt.l3, [b0, b0, b0], b1, f"{path}.l3"),
            )
            P = HomotopyAvg(
                self._map(tt.P0, f"{path}.P0"),
                self._map(tt.P1, f"{path}.P1"),
                _table(tt.P2, [b0, b0], b1, f"{path}.P2"),
            )
            P.validate(T)
            bundle.two_terms[name] = (T, P)

        for name, morphism_spec in spec.morphisms.items():
            path = f"morphisms.{name}"
            source, _ = bundle.get("two_terms", morphism_spec.source)
            target, _ = bundle.get("two_terms", morphism_spec.target)
            morphism = TwoTermMorphism(
                self._map(morphism_spec.f0, f"{path}.f0"),
                self._map(morphism_spec.f1, f"{path}.f1"),
                _table(morphism_spec.f2, [source.basis0, source.basis0], target.basis1, f"{path}.f2"),
            )
            bundle.morphisms[name] = MorphismEntry(morphism_spec.source, morphism_spec.target, morphism)

        for name, crossed_spec in spec.crossed_modules.items():
            path = f"crossed_modules.{name}"
            upper = self._averaging(crossed_spec.upper, f"{path}.upper")
            lower = self._averaging(crossed_spec.lower, f"{path}.lower")
            action = _table(
                crossed_spec.action, [lower.algebra.basis, upper.algebra.basis], upper.algebra.basis, f"{path}.action"
            )
            bundle.crossed_modules[name] = CrossedModule(
                upper,
                lower,
                self._map(crossed_spec.d, f"{path}.d"),
                ConformalRep(lower.algebra, upper.algebra.basis, action),
            )

        for name, cocycle_spec in spec.cocycles.items():
            path = f"cocycles.{name}"
            base = self._averaging(cocycle_spec.base, f"{path}.base")
            fiber = self._averaging(cocycle_spec.fiber, f"{path}.fiber")
            L, H = base.algebra.basis, fiber.algebra.basis
            bundle.cocycles[name] = NonAbCocycle(
                base,
                fiber,
                _table(cocycle_spec.chi, [L, L], H, f"{path}.chi"),
                _table(cocycle_spec.rho, [L, H], H, f"{path}.rho"),
                None if cocycle_spec.Phi is None else self._map(cocycle_spec.Phi, f"{path}.Phi"),
            )

        for name, ext in spec.extensions.items():
            path = f"extensions.{name}"
            if ext.cocycle is not None:
                bundle.extensions[name] = build_extension(bundle.get("cocycles", ext.cocycle))
                continue
            assert ext.base and ext.fiber and ext.total
            assert ext.inclusion is not None and ext.projection is not None and ext.section is not None
            bundle.extensions[name] = Extension(
                self._averaging(ext.base, f"{path}.base"),
                self._averaging(ext.fiber, f"{path}.fiber"),
                self._averaging(ext.total, f"{path}.total"),
                self._map(ext.inclusion, f"{path}.inclusion"),
                self._map(ext.projection, f"{path}.projection"),
                self._map(ext.section, f"{path}.section"),
            )

        for name, pair in spec.aut_pairs.items():
            path = f"aut_pairs.{name}"
            bundle.aut_pairs[name] = AutPair(
                self._map(pair.alpha, f"{path}.alpha"), self._map(pair.beta, f"{path}.beta")
            )
        return bundle


def _validation_path(error: ValidationError) -> Tuple[str, str]:
    first = error.errors()[0]
    path = ".".join(str(part) for part in first["loc"]) or "$"
    return path, first["msg"]


def loads_bundle(text: str, source: str = "<memory>") -> Bundle:
    """Parse and construct a bundle from JSON text."""
    data = json.loads(text)
    if not isinstance(data, dict):
        raise SchemaError("a bundle must be a JSON object")
    try:
        spec = BundleSpec.model_validate(data)
    except ValidationError as e:
        path, message = _validation_path(e)
        raise SchemaError(message, path) from e
    bundle = BundleLoader(spec, source).load()
    logger.debug(f"📦 Loaded bundle {source}")
    return bundle


def load_bundle(path: str) -> Bundle:
    return loads_bundle(Path(path).read_text(encoding="utf-8"), source=str(path))


def map_rows(matrix: ConformalMap) -> List[List[str]]:
    return [[poly_serialize(entry) for entry in row] for row in matrix.entries]


def table_spec(table: Table, name_lists: Sequence[Sequence[str]], target: Sequence[str]) -> Dict[str, str]:
    return {
        ",".join(names[k] for names, k in zip(name_lists, key)): mod_serialize(value, target)
        for key, value in table.items()
    }


class BundleWriter:
    """Canonical JSON form of a Bundle; algebras reached only through other
    structures are registered under their own names."""

    def __init__(self, bundle: Bundle):
        self.bundle = bundle
        self.algebras: Dict[str, Dict[str, Any]] = {}
        self.known: List[Tuple[str, ConformalAlgebra, Optional[ConformalMap]]] = []
        self.reps: Dict[str, Dict[str, Any]] = {}
        self.known_reps: List[Tuple[str, ConformalRep]] = []
        self.pending_cochains: Dict[str, Cochain] = {}
        for name, algebra in bundle.algebras.items():
            self._add_algebra(name, algebra, bundle.operators.get(name))

    def _fresh(self, stem: str, taken: Sequence[str]) -> str:
        candidate, k = stem, 2
        while candidate in taken:
            candidate, k = f"{stem}_{k}", k + 1
        return candidate

    def _add_algebra(self, key: str, algebra: ConformalAlgebra, operator: Optional[ConformalMap]) -> None:
        entry: Dict[str, Any] = {
            "name": algebra.name,
            "basis": list(algebra.basis),
            "bracket": table_spec(algebra.table, [algebra.basis] * 2, algebra.basis),
        }
        if isinstance(algebra, AssocConformalAlgebra):
            entry["kind"] = "assoc"
        if operator is not None:
            entry["operator"] = map_rows(operator)
        self.algebras[key] = entry
        self.known.append((key, algebra, operator))

    def algebra_ref(self, algebra: ConformalAlgebra, operator: Optional[ConformalMap] = None) -> str:
        for key, known, known_operator in self.known:
            if known == algebra and (operator is None or known_operator == operator):
                return key
        key = self._fresh(algebra.name, list(self.algebras))
        self._add_algebra(key, algebra, operator)
        return key

    def avg_ref(self, avg: AveragingAlgebra) -> str:
        return self.algebra_ref(avg.algebra, avg.operator)

    def _rep_entry(self, rep: ConformalRep) -> Dict[str, Any]:
        return {
            "algebra": self.algebra_ref(rep.algebra),
            "module_basis": list(rep.module_basis),
            "action": table_spec(rep.action, [rep.algebra.basis, rep.module_basis], rep.module_basis),
        }

    def module_ref(self, rep: ConformalRep) -> Dict[str, str]:
        if rep == adjoint_rep(rep.algebra):
            return {"algebra": self.algebra_ref(rep.algebra)}
        for key, known in self.known_reps:
            if known == rep:
                return {"rep": key}
        key = self._fresh(f"{rep.algebra.name}_module", list(self.reps))
        self.reps[key] = self._rep_entry(rep)
        self.known_reps.append((key, rep))
        return {"rep": key}

    def to_dict(self) -> Dict[str, Any]:
        bundle = self.bundle
        for name, rep in bundle.reps.items():
            entry = self._rep_entry(rep)
            triple = bundle.triples.get(name)
            if triple is not None:
                entry["phi"] = map_rows(triple.phi)
                entry["operator"] = map_rows(triple.operator)
            self.reps[name] = entry
            self.known_reps.append((name, rep))

        out: Dict[str, Any] = {"format": FORMAT_VERSION}
        if bundle.maps:
            out["maps"] = {name: map_rows(m) for name, m in bundle.maps.items()}

        cochains = {}
        for name, c in bundle.cochains.items():
            entry: Dict[str, Any] = {"degree": c.degree}
            entry.update(self.module_ref(c.rep))
            entry["values"] = table_spec(c.values, [c.algebra.basis] * c.degree, c.rep.module_basis)
            cochains[name] = entry
        if cochains:
            out["cochains"] = cochains

        pairs = {}
        for name, pair in bundle.pairs.items():
            pairs[name] = {"f": self._cochain_name(pair.f, f"{name}_f"), "g": self._cochain_name(pair.g, f"{name}_g")}
        if pairs:
            out["pairs"] = pairs
            out["cochains"] = self._extra_cochains(out.get("cochains", {}))

        two_terms = {}
        for name, (T, P) in bundle.two_terms.items():
            b0, b1 = T.basis0, T.basis1
            two_terms[name] = {
                "name": T.name,
                "basis0": list(b0),
                "basis1": list(b1),
                "d": map_rows(T.d),
                "bracket00": table_spec(T.bracket00, [b0, b0], b0),
                "bracket01": table_spec(T.bracket01, [b0, b1], b1),
                "l3": table_spec(T.l3, [b0, b0, b0], b1),
                "P0": map_rows(P.P0),
                "P1": map_rows(P.P1),
                "P2": table_spec(P.P2, [b0, b0], b1),
            }
        morphisms = {}
        for name, entry_m in bundle.morphisms.items():
            source, _ = bundle.two_terms[entry_m.source]
            target, _ = bundle.two_terms[entry_m.target]
            M = entry_m.morphism
            morphisms[name] = {
                "source": entry_m.source,
                "target": entry_m.target,
                "f0": map_rows(M.f0),
                "f1": map_rows(M.f1),
                "f2": table_spec(M.f2, [source.basis0, source.basis0], target.basis1),
            }

        crossed = {}
        for name, C in bundle.crossed_modules.items():
            upper, lower = C.upper.algebra, C.lower.algebra
            crossed[name] = {
                "upper": self.avg_ref(C.upper),
                "lower": self.avg_ref(C.lower),
                "d": map_rows(C.d),
                "action": table_spec(C.action.action, [lower.basis, upper.basis], upper.basis),
            }

        cocycles = {}
        for name, c in bundle.cocycles.items():
            L, H = c.base.algebra.basis, c.fiber.algebra.basis
            cocycles[name] = {
                "base": self.avg_ref(c.base),
                "fiber": self.avg_ref(c.fiber),
                "chi": table_spec(c.chi, [L, L], H),
                "rho": table_spec(c.rho, [L, H], H),
                "Phi": map_rows(c.phi),
            }

        extensions = {}
        for name, E in bundle.extensions.items():
            source = self._cocycle_source(E)
            if source is not None:
                extensions[name] = {"cocycle": source}
                continue
            extensions[name] = {
                "base": self.avg_ref(E.base),
                "fiber": self.avg_ref(E.fiber),
                "total": self.avg_ref(E.total),
                "inclusion": map_rows(E.inclusion),
                "projection": map_rows(E.projection),
                "section": map_rows(E.section),
            }

        aut_pairs = {
            name: {"alpha": map_rows(ap.alpha), "beta": map_rows(ap.beta)}
            for name, ap in bundle.aut_pairs.items()
        }

        for key, collection in (
            ("two_terms", two_terms),
            ("morphisms", morphisms),
            ("crossed_modules", crossed),
            ("cocycles", cocycles),
            ("extensions", extensions),
            ("aut_pairs", aut_pairs),
            ("reps", self.reps),
            ("algebras", self.algebras),
        ):
            if collection:
                out[key] = collection
        return _fold_default(out)

    def _cocycle_source(self, E: Extension) -> Optional[str]:
        """Name of a bundle cocycle whose extension is exactly E."""
        for name, c in self.bundle.cocycles.items():
            if c.base == E.base and c.fiber == E.fiber and build_extension(c, require_cocycle=False) == E:
                return name
        return None

    def _cochain_name(self, cochain: Cochain, fallback: str) -> str:
        for name, known in self.bundle.cochains.items():
            if known == cochain:
                return name
        self.pending_cochains[fallback] = cochain
        return fallback

    def _extra_cochains(self, cochains: Dict[str, Any]) -> Dict[str, Any]:
        for name, c in self.pending_cochains.items():
            entry: Dict[str, Any] = {"degree": c.degree}
            entry.update(self.module_ref(c.rep))
            entry["values"] = table_spec(c.values, [c.algebra.basis] * c.degree, c.rep.module_basis)
            cochains[name] = entry
        return cochains


def _fold_default(out: Dict[str, Any]) -> Dict[str, Any]:
    """Write a collection holding only "default" under its singular key."""
    for single, plural in SINGULAR_KEYS.items():
        collection = out.get(plural)
        if collection is not None and list(collection) == ["default"]:
            out[single] = out.pop(plural)["default"]
    return out


def dump_bundle(bundle: Bundle) -> str:
    """Canonical text: sorted keys, the configured indent, trailing newline."""
    indent = int(get_toolkit_settings()["json_indent"])
    return json.dumps(BundleWriter(bundle).to_dict(), sort_keys=True, indent=indent, ensure_ascii=False) + "\n"


def save_bundle(bundle: Bundle, path: str) -> None:
    Path(path).write_text(dump_bundle(bundle), encoding="utf-8")
    logger.info(f"✅ Wrote bundle to {path}")
