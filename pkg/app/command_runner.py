# app/command_runner.py
"""Dispatch of parsed ``lca`` subcommands onto the core checks.

Every handler returns a Report; structures produced by a command (a coboundary,
an extension, a crossed module) travel in ``report.artifacts``.
"""
import argparse
from typing import Any, Callable, Dict, Optional

from bundles.bundle_store import Bundle, BundleWriter, load_bundle, map_rows, table_spec
from core import cohomology, conformal, extensions, homotopy2, representations
from core.cohomology import Cochain, CochainPair
from core.conformal import AssocConformalAlgebra, ConformalMap
from core.errors import SchemaError
from core.report import Report, single_check
from utils.config_loader import get_toolkit_settings
from utils.logger import logger


def cochain_artifact(c: Cochain) -> Dict[str, Any]:
    return {
        "degree": c.degree,
        "values": table_spec(c.values, [c.algebra.basis] * c.degree, c.rep.module_basis),
    }


def bundle_artifact(bundle: Bundle) -> Dict[str, Any]:
    return BundleWriter(bundle).to_dict()


class CommandRunner:
    """Runs one subcommand against the bundle named by ``--input``."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        self._bundle: Optional[Bundle] = None
        self.handlers: Dict[str, Callable[[], Report]] = {
            "check": self.check,
            "avg-check": self.avg_check,
            "rep-check": self.rep_check,
            "cohom": self.cohom,
            "twoterm": self.twoterm,
            "crossed": self.crossed,
            "ext": self.ext,
            "wells": self.wells,
            "solve-tau": self.solve_tau,
        }

    @property
    def bundle(self) -> Bundle:
        if self._bundle is None:
            if not self.args.input:
                raise SchemaError("this command needs --input", "--input")
            self._bundle = load_bundle(self.args.input)
        return self._bundle

    def run(self) -> Report:
        command = self.args.command
        logger.debug(f"🔧 Running {command}")
        return self.handlers[command]()

    def _map(self, name: str) -> ConformalMap:
        """A named map; ``NAME`` of an algebra with an operator also resolves to that operator."""
        if name in self.bundle.maps:
            return self.bundle.maps[name]
        if name in self.bundle.operators:
            return self.bundle.operators[name]
        raise SchemaError(f"unknown map {name!r}", f"maps.{name}")

    # algebra level

    def check(self) -> Report:
        algebra = self.bundle.get("algebras", self.args.algebra)
        report = Report(subject=algebra.name)
        if isinstance(algebra, AssocConformalAlgebra):
            return report.merge(conformal.check_conformal_associativity(algebra))
        report.merge(conformal.check_skew(algebra))
        report.merge(conformal.check_jacobi(algebra))
        return report

    def avg_check(self) -> Report:
        name = self.args.algebra
        algebra = self.bundle.get("algebras", name)
        operator = self._map(self.args.op) if self.args.op else self.bundle.averaging(name).operator
        report = Report(subject=f"{algebra.name} with {self.args.op or 'its operator'}")
        if isinstance(algebra, AssocConformalAlgebra):
            return report.merge(conformal.check_assoc_averaging(algebra, operator))
        report.merge(conformal.check_averaging(algebra, operator))
        if self.args.two_sided:
            report.merge(conformal.check_two_sided_averaging(algebra, operator))
        if self.args.induced:
            induced = conformal.induced_bracket(algebra, operator)
            report.merge(conformal.check_skew(induced), prefix="induced")
            report.merge(conformal.check_jacobi(induced), prefix="induced")
            report.merge(conformal.check_induced_morphism(algebra, operator))
        return report

    def rep_check(self) -> Report:
        name = self.args.rep
        rep = self.bundle.get("reps", name)
        report = Report(subject=f"{rep.algebra.name} module {name}")
        report.merge(representations.check_rep(rep))
        triple = self.bundle.triples.get(name)
        if triple is not None:
            report.merge(representations.check_avg_rep(triple))
            if self.args.semidirect:
                report.merge(representations.check_semidirect_operators(triple), prefix="semidirect")
        elif self.args.semidirect:
            raise SchemaError("semidirect operators need phi and operator", f"reps.{name}")
        if self.args.tensor:
            tensor = self._map(self.args.tensor)
            report.merge(representations.check_embedding_tensor(rep.algebra, rep, tensor))
            algebra, operator = representations.lift_embedding_tensor(rep.algebra, rep, tensor)
            report.merge(conformal.check_averaging(algebra, operator), prefix="lifted")
        return report

    # cohomology

    def _cochain(self, name: Optional[str], flag: str) -> Cochain:
        if name is None:
            raise SchemaError(f"{flag} is required for this action", flag)
        cochain: Cochain = self.bundle.get("cochains", name)
        return cochain

    def _triple(self) -> representations.AvgRepTriple:
        triple: representations.AvgRepTriple = self.bundle.get("triples", self.args.rep)
        return triple

    def cohom(self) -> Report:
        action = self.args.action
        report = Report(subject=f"cohom {action}")
        if action == "delta":
            f = self._cochain(self.args.cochain, "--cochain")
            image = cohomology.delta(f)
            report.artifacts["delta"] = cochain_artifact(image)
            if image.degree < int(get_toolkit_settings()["max_cochain_degree"]):
                zero = Cochain.zero(f.rep, image.degree + 1)
                report.merge(cohomology.cochain_equality_check("delta-squared", cohomology.delta(image), zero))
        elif action == "delta-ao":
            g = self._cochain(self.args.cochain, "--cochain")
            T = self._triple()
            image = cohomology.delta_AO(g, T)
            report.artifacts["delta_ao"] = cochain_artifact(image)
            if image.degree < int(get_toolkit_settings()["max_cochain_degree"]):
                zero = Cochain.zero(g.rep, image.degree + 1)
                report.merge(
                    cohomology.cochain_equality_check("delta-ao-squared", cohomology.delta_AO(image, T), zero)
                )
        elif action == "xi":
            f = self._cochain(self.args.cochain, "--cochain")
            T = self._triple()
            image = cohomology.xi(f, T)
            report.artifacts["xi"] = cochain_artifact(image)
            report.artifacts["xi_literal"] = cochain_artifact(cohomology.xi_literal(f, T))
            if f.degree < int(get_toolkit_settings()["max_cochain_degree"]):
                report.merge(
                    cohomology.cochain_equality_check(
                        "chain-map", cohomology.xi(cohomology.delta(f), T), cohomology.delta_AO(image, T)
                    )
                )
        elif action == "dal":
            pair = self._pair()
            T = self._triple()
            image = cohomology.d_AL(pair, T)
            report.artifacts["d_al"] = {"f": cochain_artifact(image.f), "g": cochain_artifact(image.g)}
            if image.degree < int(get_toolkit_settings()["max_cochain_degree"]):
                square = cohomology.d_AL(image, T).is_zero()
                report.add(single_check("dal-squared", square, None if square else "d_AL(d_AL(f, g)) is nonzero"))
        elif action == "nr":
            f = self._cochain(self.args.cochain, "--cochain")
            g = self._cochain(self.args.cochain2, "--cochain2")
            report.artifacts["nr"] = cochain_artifact(cohomology.nr_bracket(f, g))
            if self.args.cochain3:
                h = self._cochain(self.args.cochain3, "--cochain3")
                report.merge(cohomology.check_nr_jacobi(f, g, h))
            else:
                report.add(single_check("nr-bracket", True, f"degree {f.degree + g.degree - 1}"))
        elif action == "mc":
            eta = self._cochain(self.args.cochain, "--cochain")
            report.merge(cohomology.mc_check(eta))
            if self.args.cochain2:
                report.merge(cohomology.compare_d_eta_delta(eta, self._cochain(self.args.cochain2, "--cochain2")))
        return report

    def _pair(self) -> CochainPair:
        if self.args.pair:
            pair: CochainPair = self.bundle.get("pairs", self.args.pair)
            return pair
        return CochainPair(
            self._cochain(self.args.cochain, "--cochain"), self._cochain(self.args.cochain2, "--cochain2")
        )

    # two-term structures and crossed modules

    def twoterm(self) -> Report:
        T, P = self.bundle.get("two_terms", self.args.two_term)
        action = self.args.action
        report = Report(subject=f"{T.name} {action}")
        if action == "check":
            report.merge(homotopy2.check_2term(T))
            report.merge(homotopy2.check_homotopy_avg(T, P))
            if self.args.morphism:
                entry = self.bundle.get("morphisms", self.args.morphism)
                target, _ = self.bundle.get("two_terms", entry.target)
                report.merge(homotopy2.check_morphism(T, target, entry.morphism))
            if self.args.literal:
                report.merge(homotopy2.literal_form_checks(T, P))
        elif action == "classify":
            labels = homotopy2.classify(T, P)
            report.artifacts["classes"] = labels
            report.add(single_check("classify", True, ", ".join(labels)))
        elif action == "to-crossed":
            C = homotopy2.strict_to_crossed(T, P)
            report.merge(homotopy2.check_crossed_module(C))
            report.artifacts["bundle"] = bundle_artifact(Bundle(crossed_modules={"default": C}))
        elif action == "to-cocycle":
            triple, pair = homotopy2.skeletal_to_cocycle(T, P)
            report.add(single_check("cocycle-closed", True, "d_AL(l3, P2) = 0"))
            out = Bundle(
                reps={"default": triple.rep},
                triples={"default": triple},
                cochains={"l3": pair.f, "P2": pair.g},
                pairs={"default": pair},
            )
            report.artifacts["bundle"] = bundle_artifact(out)
        elif action == "direct-sum":
            algebra, operator = homotopy2.strict_direct_sum(T, P)
            report.merge(self._sum_checks(algebra, operator))
        return report

    def _sum_checks(self, algebra: conformal.LieConformalAlgebra, operator: ConformalMap) -> Report:
        report = Report(subject=algebra.name)
        report.merge(conformal.check_skew(algebra))
        report.merge(conformal.check_jacobi(algebra))
        report.merge(conformal.check_averaging(algebra, operator))
        out = Bundle(algebras={"default": algebra}, operators={"default": operator})
        report.artifacts["bundle"] = bundle_artifact(out)
        return report

    def crossed(self) -> Report:
        C = self.bundle.get("crossed_modules", self.args.crossed)
        action = self.args.action
        report = Report(subject=f"{C.upper.name} -> {C.lower.name} {action}")
        if action == "check":
            return report.merge(homotopy2.check_crossed_module(C))
        if action == "to-strict":
            T, P = homotopy2.crossed_to_strict(C)
            report.merge(homotopy2.check_2term(T))
            report.merge(homotopy2.check_homotopy_avg(T, P))
            report.artifacts["bundle"] = bundle_artifact(Bundle(two_terms={"default": (T, P)}))
            return report
        algebra, operator = homotopy2.crossed_direct_sum(C)
        return report.merge(self._sum_checks(algebra, operator))

    # extensions

    def _extension(self) -> extensions.Extension:
        if self.args.extension:
            E: extensions.Extension = self.bundle.get("extensions", self.args.extension)
            return E
        return extensions.build_extension(self.bundle.get("cocycles", self.args.cocycle))

    def ext(self) -> Report:
        action = self.args.action
        report = Report(subject=f"ext {action}")
        if action == "check-cocycle":
            return report.merge(extensions.check_cocycle(self.bundle.get("cocycles", self.args.cocycle)))
        if action == "build":
            E = extensions.build_extension(self.bundle.get("cocycles", self.args.cocycle))
            report.merge(extensions.check_extension(E))
            report.artifacts["bundle"] = bundle_artifact(Bundle(extensions={"default": E}))
            return report
        if action == "extract":
            E = self._extension()
            section = self._map(self.args.section) if self.args.section else None
            c = extensions.extract_cocycle(E, section)
            report.merge(extensions.check_cocycle(c))
            report.artifacts["bundle"] = bundle_artifact(Bundle(cocycles={"default": c}))
            return report
        if self.args.map:
            first = self.bundle.get("extensions", self.args.extension)
            second = self.bundle.get("extensions", self.args.extension2)
            return report.merge(extensions.check_ext_equivalence(first, second, self._map(self.args.map)))
        if not self.args.tau:
            raise SchemaError("equiv needs --tau (or --map with two extensions)", "--tau")
        c = self.bundle.get("cocycles", self.args.cocycle)
        c2 = self.bundle.get("cocycles", self.args.cocycle2)
        return report.merge(extensions.check_equivalence(c, c2, self._map(self.args.tau)))

    def wells(self) -> Report:
        E = self._extension()
        if self.args.gamma:
            ap, tau = extensions.wells_witness(E, self._map(self.args.gamma))
            report = extensions.wells_verify(ap, E, tau)
            report.artifacts["pair"] = {"alpha": map_rows(ap.alpha), "beta": map_rows(ap.beta)}
            report.artifacts["tau"] = map_rows(tau)
            return report
        if self.args.aut_pair:
            ap = self.bundle.get("aut_pairs", self.args.aut_pair)
        elif self.args.alpha and self.args.beta:
            ap = extensions.AutPair(self._map(self.args.alpha), self._map(self.args.beta))
        else:
            raise SchemaError("wells needs --aut-pair, --alpha with --beta, or --gamma", "--alpha")
        tau = self._map(self.args.tau) if self.args.tau else ConformalMap.zero(E.fiber.rank, E.base.rank)
        return extensions.wells_verify(ap, E, tau)

    def solve_tau(self) -> Report:
        c = self.bundle.get("cocycles", self.args.cocycle)
        c2 = self.bundle.get("cocycles", self.args.cocycle2)
        tau = extensions.tau_solve_abelian(c, c2, self.args.cap)
        cap = self.args.cap if self.args.cap is not None else get_toolkit_settings()["default_tau_cap"]
        report = Report(subject=f"tau search between {self.args.cocycle} and {self.args.cocycle2}")
        if tau is None:
            return report.add(single_check("tau-found", False, f"no witness of degree <= {cap}"))
        report.add(single_check("tau-found", True, f"degree cap {cap}"))
        report.artifacts["tau"] = map_rows(tau)
        return report

