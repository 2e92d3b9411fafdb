# bundles/library.py
"""Builtin bundles, printed by ``lca builtin NAME`` and shipped in corpus/."""
from typing import Callable, Dict, List

from core import builtins
from core.cohomology import CochainPair, bracket_cochain, identity_cochain
from core.conformal import ConformalMap, LieConformalAlgebra
from core.errors import SchemaError
from core.extensions import build_extension
from core.homotopy2 import identity_morphism, kernel_crossed_module, strict_to_crossed
from core.representations import AvgRepTriple, adjoint_rep
from bundles.bundle_store import Bundle, MorphismEntry


def _with_identity(algebra: LieConformalAlgebra, cochains: bool = True) -> Bundle:
    n = algebra.rank
    identity = ConformalMap.identity(n)
    bundle = Bundle(source=f"builtin:{algebra.name}")
    bundle.algebras["default"] = algebra
    bundle.operators["default"] = identity
    bundle.maps.update(
        {
            "Id": identity,
            "Twice": builtins.scaled_identity(n, 2),
            "Half": builtins.scaled_identity(n, 1, 2),
            "Zero": ConformalMap.zero(n, n),
        }
    )
    if cochains:
        rep = adjoint_rep(algebra)
        bundle.reps["default"] = rep
        bundle.triples["default"] = AvgRepTriple(rep, identity, identity)
        bundle.cochains["id"] = identity_cochain(algebra)
        bundle.cochains["eta"] = bracket_cochain(algebra)
        bundle.pairs["eta_id"] = CochainPair(bundle.cochains["eta"], bundle.cochains["id"])
    return bundle


def _vir_sum(n: int) -> Bundle:
    algebra, operators = builtins.vir_sum(n)
    bundle = Bundle(source=f"builtin:vir_sum{n}")
    bundle.algebras["default"] = algebra
    bundle.operators["default"] = operators["P"]
    bundle.maps.update(operators)
    bundle.maps["Id"] = ConformalMap.identity(algebra.rank)
    return bundle


def _broken_skew() -> Bundle:
    return _with_identity(builtins.broken_skew(), cochains=False)


def _tensor2() -> Bundle:
    bundle = _with_identity(builtins.cur_sl2(), cochains=False)
    for mode in ("sum", "product"):
        triple = builtins.tensor2(mode)
        bundle.reps[mode] = triple.rep
        bundle.triples[mode] = triple
    return bundle


def _crossed_id_ad() -> Bundle:
    T, P = builtins.crossed_id_ad()
    bundle = Bundle(source="builtin:crossed_id_ad")
    bundle.two_terms["default"] = (T, P)
    bundle.morphisms["identity"] = MorphismEntry("default", "default", identity_morphism(T))
    bundle.crossed_modules["default"] = strict_to_crossed(T, P)
    return bundle


def _kernel() -> Bundle:
    bundle = Bundle(source="builtin:kernel")
    bundle.crossed_modules["default"] = kernel_crossed_module(
        builtins.virasoro(), builtins.scaled_identity(1, 2)
    )
    return bundle


def _cocycles() -> Bundle:
    corpus = builtins.cocycle_corpus()
    bundle = Bundle(source="builtin:cocycles")
    bundle.cocycles.update(corpus.cocycles)
    bundle.aut_pairs.update(corpus.aut_pairs)
    bundle.maps.update(corpus.witnesses)
    bundle.extensions["semidirect"] = build_extension(corpus.cocycles["weight_one"])
    bundle.extensions["shifted"] = build_extension(corpus.cocycles["shifted"])
    bundle.extensions["adjoint"] = build_extension(corpus.cocycles["adjoint"])
    return bundle


def _mat2() -> Bundle:
    bundle = Bundle(source="builtin:mat2")
    algebra = builtins.mat2()
    bundle.algebras["default"] = algebra
    bundle.operators["default"] = ConformalMap.identity(algebra.rank)
    bundle.algebras["commutator"] = builtins.cur_gl2()
    bundle.operators["commutator"] = ConformalMap.identity(algebra.rank)
    return bundle


BUILTINS: Dict[str, Callable[[], Bundle]] = {
    "virasoro": lambda: _with_identity(builtins.virasoro()),
    "cur_sl2": lambda: _with_identity(builtins.cur_sl2()),
    "abelian_2": lambda: _with_identity(builtins.abelian(2)),
    "cur_gl2": lambda: _with_identity(builtins.cur_gl2()),
    "mat2": _mat2,
    "vir_sum2": lambda: _vir_sum(2),
    "vir_sum3": lambda: _vir_sum(3),
    "broken_skew": _broken_skew,
    "broken_jacobi": lambda: _with_identity(builtins.broken_jacobi()),
    "tensor2": _tensor2,
    "crossed_id_ad": _crossed_id_ad,
    "kernel": _kernel,
    "cocycles": _cocycles,
}


def builtin_names() -> List[str]:
    return sorted(BUILTINS)


def builtin_bundle(name: str) -> Bundle:
    if name not in BUILTINS:
        raise SchemaError(f"unknown builtin {name!r} (available: {', '.join(builtin_names())})", "builtin")
    return BUILTINS[name]()
