# core/builtins.py
"""Builtin algebras, operators and cocycle data used by the corpus and the tests."""
from dataclasses import dataclass
from typing import Dict, Tuple

from core.conformal import (
    L1,
    AssocConformalAlgebra,
    AveragingAlgebra,
    ConformalMap,
    LieConformalAlgebra,
    commutator_lca,
    direct_sum_example,
)
from core.errors import ConstructionError
from core.extensions import AutPair, NonAbCocycle
from core.homotopy2 import CrossedModule, HomotopyAvg, TwoTermLInfinity, strict_to_crossed
from core.representations import AvgRepTriple, tensor_square_rep
from core.symalg import D, POLY_RING, ModElem, const
from utils.logger import logger

SL2_BASIS = ("E", "H", "F")
# [a, b] of sl2 on the basis (E, H, F), as (coefficient, target) pairs
SL2_BRACKET = {
    ("E", "H"): (-2, "E"),
    ("H", "E"): (2, "E"),
    ("E", "F"): (1, "H"),
    ("F", "E"): (-1, "H"),
    ("H", "F"): (-2, "F"),
    ("F", "H"): (2, "F"),
}


def virasoro(name: str = "Vir", symbol: str = "L") -> LieConformalAlgebra:
    """[L_l L] = (D + 2 l) L."""
    return LieConformalAlgebra(name, (symbol,), {(0, 0): ModElem((D + 2 * L1,))})


def cur_sl2(name: str = "Cur_sl2") -> LieConformalAlgebra:
    """Current algebra of sl2: [a_l b] = [a, b]."""
    index = {b: k for k, b in enumerate(SL2_BASIS)}
    table = {
        (index[a], index[b]): ModElem.basis(3, index[target], const(coeff))
        for (a, b), (coeff, target) in SL2_BRACKET.items()
    }
    return LieConformalAlgebra(name, SL2_BASIS, table)


def abelian(n: int, name: str = "", symbol: str = "A") -> LieConformalAlgebra:
    if n < 1:
        raise ConstructionError(f"abelian algebra needs rank >= 1, got {n}")
    basis = (symbol,) if n == 1 else tuple(f"{symbol}{k + 1}" for k in range(n))
    return LieConformalAlgebra(name or f"abelian_{n}", basis, {})


def mat2(name: str = "Mat2") -> AssocConformalAlgebra:
    """Current associative algebra of 2x2 matrices: e_ij e_kl = delta_jk e_il."""
    basis = ("E11", "E12", "E21", "E22")
    pairs = [(0, 0), (0, 1), (1, 0), (1, 1)]
    table = {}
    for a, (i, j) in enumerate(pairs):
        for b, (k, l) in enumerate(pairs):
            if j == k:
                table[(a, b)] = ModElem.basis(4, pairs.index((i, l)))
    return AssocConformalAlgebra(name, basis, table)


def cur_gl2() -> LieConformalAlgebra:
    return commutator_lca(mat2(), "Cur_gl2")


def broken_skew() -> LieConformalAlgebra:
    """[L_l L] = l L, which is not skew-symmetric."""
    return LieConformalAlgebra("broken_skew", ("L",), {(0, 0): ModElem((L1,))})


def broken_jacobi() -> LieConformalAlgebra:
    """Skew-symmetric constant bracket [A, B] = C, [A, C] = A that violates Jacobi."""
    basis = ("A", "B", "C")
    one = POLY_RING.one
    table = {
        (0, 1): ModElem.basis(3, 2, one),
        (1, 0): ModElem.basis(3, 2, -one),
        (0, 2): ModElem.basis(3, 0, one),
        (2, 0): ModElem.basis(3, 0, -one),
    }
    return LieConformalAlgebra("broken_jacobi", basis, table)


def vir_sum(n: int) -> Tuple[LieConformalAlgebra, Dict[str, ConformalMap]]:
    """n copies of Virasoro with the operators P, P_2, ..., P_n."""
    algebra, operators = direct_sum_example(virasoro(), n)
    names = ["P"] + [f"P_{k}" for k in range(2, n + 1)]
    return algebra, dict(zip(names, operators))


def scaled_identity(rank: int, numerator: int, denominator: int = 1) -> ConformalMap:
    return ConformalMap.scalar(rank, const(numerator, denominator))


def tensor2(mode: str) -> AvgRepTriple:
    """Tensor square of Cur(sl2) with the identity operator."""
    return tensor_square_rep(cur_sl2(), ConformalMap.identity(3), mode)


def crossed_id_ad(scale: int = 2) -> Tuple[TwoTermLInfinity, HomotopyAvg]:
    """Virasoro -> Virasoro by the identity, acting by the adjoint action, with P0 = P1 = scale."""
    vir = virasoro()
    operator = scaled_identity(1, scale)
    T = TwoTermLInfinity(
        "vir_id", vir.basis, ("M",), ConformalMap.identity(1), dict(vir.table), dict(vir.table), {}
    )
    return T, HomotopyAvg(operator, operator, {})


def crossed_id_ad_module(scale: int = 2) -> CrossedModule:
    return strict_to_crossed(*crossed_id_ad(scale))


@dataclass(frozen=True)
class CocycleCorpus:
    """Cocycles over Virasoro used to exercise extensions and the Wells verifier."""

    cocycles: Dict[str, NonAbCocycle]
    aut_pairs: Dict[str, AutPair]
    witnesses: Dict[str, ConformalMap]


def _vir_base(scale: int = 1) -> AveragingAlgebra:
    return AveragingAlgebra(virasoro(), scaled_identity(1, scale))


def _line(name: str, symbol: str, scale: int) -> AveragingAlgebra:
    return AveragingAlgebra(abelian(1, name, symbol), scaled_identity(1, scale))


def _h(coeff: object) -> ModElem:
    return ModElem((POLY_RING(coeff),))


def cocycle_corpus() -> CocycleCorpus:
    """weight_one: Virasoro acting on C[D]h by (D + l) h, the semidirect case.
    zero: the same fiber with trivial action. adjoint: Virasoro acting on a second
    Virasoro by the adjoint action. shifted: chi = (D + 2 l) h and Phi = -h over Q = 2,
    equivalent to the zero cocycle of that fiber through tau(L) = -h.
    """
    base = _vir_base()
    line = _line("line", "H", 1)
    doubled = _line("line2", "H", 2)
    fiber_vir = AveragingAlgebra(virasoro("Vir_M", "M"), ConformalMap.identity(1))
    cocycles = {
        "weight_one": NonAbCocycle(base, line, {}, {(0, 0): _h(D + L1)}),
        "zero": NonAbCocycle(base, line),
        "adjoint": NonAbCocycle(base, fiber_vir, {}, {(0, 0): _h(D + 2 * L1)}),
        "shifted": NonAbCocycle(
            base, doubled, {(0, 0): _h(D + 2 * L1)}, {}, ConformalMap.from_rows([[-1]])
        ),
        "shifted_zero": NonAbCocycle(base, doubled),
    }
    aut_pairs = {
        "identity": AutPair(ConformalMap.identity(1), ConformalMap.identity(1)),
        "triple_fiber": AutPair(scaled_identity(1, 3), ConformalMap.identity(1)),
    }
    witnesses = {
        "shift": ConformalMap.from_rows([[-1]]),
        "triple_fiber": ConformalMap.from_rows([[-2]]),
    }
    logger.debug(f"📦 Cocycle corpus with {len(cocycles)} cocycles")
    return CocycleCorpus(cocycles, aut_pairs, witnesses)
