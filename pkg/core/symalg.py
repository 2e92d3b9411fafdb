# core/symalg.py
"""Exact polynomials in D, L1..L9 over the rationals and free C[D]-module elements.

D stands for the derivation and L1..L9 for the lambda variables. Every scalar in
the toolkit is a sympy ``PolyElement`` of the single ring below, so equality is
exact and no floating point value ever enters a check.
"""
from dataclasses import dataclass
from itertools import product
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from sympy import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, ring

from core.errors import DegreeError, DimensionError

LAMBDA_SLOTS = 9
VARIABLE_NAMES: Tuple[str, ...] = ("D",) + tuple(f"L{k}" for k in range(1, LAMBDA_SLOTS + 1))
TEXT_NAMES: Tuple[str, ...] = tuple(name.lower() for name in VARIABLE_NAMES)

POLY_RING, *_GENERATORS = ring(",".join(VARIABLE_NAMES), QQ, grlex)
D: PolyElement = _GENERATORS[0]
LAMBDAS: Tuple[PolyElement, ...] = tuple(_GENERATORS[1:])

Poly = PolyElement
BasisTuple = Tuple[int, ...]


def lam(k: int) -> Poly:
    """The k-th lambda variable (1-based)."""
    if not 1 <= k <= LAMBDA_SLOTS:
        raise DegreeError(f"lambda slot {k} outside 1..{LAMBDA_SLOTS}")
    return LAMBDAS[k - 1]


def const(numerator: int, denominator: int = 1) -> Poly:
    """Constant polynomial numerator/denominator."""
    return POLY_RING(QQ(numerator, denominator))


def poly_add(a: Poly, b: Poly) -> Poly:
    return a + b


def poly_sub(a: Poly, b: Poly) -> Poly:
    return a - b


def poly_neg(a: Poly) -> Poly:
    return -a


def poly_mul(a: Poly, b: Poly) -> Poly:
    return a * b


def lambda_sum(lambdas: Iterable[Poly]) -> Poly:
    total = POLY_RING.zero
    for item in lambdas:
        total = total + item
    return total


def poly_subst(p: Poly, bindings: Mapping[Poly, Poly]) -> Poly:
    """Simultaneous substitution of generators; images are never re-substituted."""
    replacements = [(gen, POLY_RING(image)) for gen, image in bindings.items() if image != gen]
    if not replacements or not p:
        return p
    result: Poly = p.compose(replacements)
    return result


def max_lambda_index(p: Poly) -> int:
    """Largest k such that Lk occurs in p (0 when p only uses D)."""
    best = 0
    for monom in p.itermonoms():
        for k in range(LAMBDA_SLOTS, best, -1):
            if monom[k]:
                best = k
                break
    return best


def require_lambda_bound(p: Poly, bound: int, where: str) -> None:
    """Raise DegreeError when p mentions a lambda variable beyond ``bound``."""
    used = max_lambda_index(p)
    if used > bound:
        allowed = "only d" if bound == 0 else f"d, l1..l{bound}"
        raise DegreeError(f"{where} uses l{used} but may use {allowed}")


def _sort_key(monom: Tuple[int, ...]) -> Tuple[int, Tuple[int, ...]]:
    return sum(monom), tuple(reversed(monom))


def _rational_text(coeff: object) -> str:
    numerator = int(coeff.numerator)  # type: ignore[attr-defined]
    denominator = int(coeff.denominator)  # type: ignore[attr-defined]
    return str(numerator) if denominator == 1 else f"{numerator}/{denominator}"


def _term_text(monom: Tuple[int, ...], magnitude: object) -> str:
    factors = []
    for name, exponent in zip(TEXT_NAMES, monom):
        if exponent == 1:
            factors.append(name)
        elif exponent > 1:
            factors.append(f"{name}^{exponent}")
    if not factors:
        return _rational_text(magnitude)
    if magnitude == 1:
        return "*".join(factors)
    return "*".join([_rational_text(magnitude)] + factors)


def poly_terms(p: Poly) -> List[Tuple[Tuple[int, ...], object]]:
    """Terms in canonical ascending order."""
    return sorted(p.items(), key=lambda item: _sort_key(item[0]))


def poly_serialize(p: Poly) -> str:
    """Canonical text: ascending graded order, D < L1 < ... < L9, explicit rationals."""
    if not p:
        return "0"
    pieces = []
    for index, (monom, coeff) in enumerate(poly_terms(p)):
        negative = coeff < 0
        body = _term_text(monom, -coeff if negative else coeff)
        if index == 0:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f" - {body}" if negative else f" + {body}")
    return "".join(pieces)


@dataclass(frozen=True)
class ModElem:
    """Element of a free C[D]-module of rank ``len(coords)``; D acts componentwise."""

    coords: Tuple[Poly, ...]

    def __post_init__(self) -> None:
        if not self.coords:
            raise DimensionError("module elements need rank >= 1")

    @property
    def rank(self) -> int:
        return len(self.coords)

    @classmethod
    def zero(cls, rank: int) -> "ModElem":
        if rank < 1:
            raise DimensionError(f"rank must be positive, got {rank}")
        return cls(tuple(POLY_RING.zero for _ in range(rank)))

    @classmethod
    def basis(cls, rank: int, index: int, coeff: Optional[Poly] = None) -> "ModElem":
        if not 0 <= index < rank:
            raise DimensionError(f"basis index {index} outside rank {rank}")
        value = POLY_RING.one if coeff is None else coeff
        return cls(tuple(value if k == index else POLY_RING.zero for k in range(rank)))

    @classmethod
    def from_polys(cls, polys: Iterable[Poly]) -> "ModElem":
        return cls(tuple(POLY_RING(p) for p in polys))

    def _check_rank(self, other: "ModElem") -> None:
        if self.rank != other.rank:
            raise DimensionError(f"rank mismatch: {self.rank} vs {other.rank}")

    def __add__(self, other: "ModElem") -> "ModElem":
        self._check_rank(other)
        return ModElem(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "ModElem") -> "ModElem":
        self._check_rank(other)
        return ModElem(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "ModElem":
        return ModElem(tuple(-a for a in self.coords))

    def scale(self, p: Poly) -> "ModElem":
        return ModElem(tuple(p * a for a in self.coords))

    def subst(self, bindings: Mapping[Poly, Poly]) -> "ModElem":
        return ModElem(tuple(poly_subst(a, bindings) for a in self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def max_lambda_index(self) -> int:
        return max(max_lambda_index(a) for a in self.coords)

    def embed(self, offset: int, total_rank: int) -> "ModElem":
        """Place the coordinates at ``offset`` inside a module of rank ``total_rank``."""
        if offset < 0 or offset + self.rank > total_rank:
            raise DimensionError(f"cannot embed rank {self.rank} at {offset} in {total_rank}")
        coords = [POLY_RING.zero] * total_rank
        coords[offset : offset + self.rank] = self.coords
        return ModElem(tuple(coords))

    def block(self, start: int, stop: int) -> "ModElem":
        if not 0 <= start < stop <= self.rank:
            raise DimensionError(f"block {start}:{stop} outside rank {self.rank}")
        return ModElem(self.coords[start:stop])


def mod_add(a: ModElem, b: ModElem) -> ModElem:
    return a + b


def mod_sub(a: ModElem, b: ModElem) -> ModElem:
    return a - b


def mod_neg(a: ModElem) -> ModElem:
    return -a


def mod_zero(rank: int) -> ModElem:
    return ModElem.zero(rank)


def basis_vector(rank: int, index: int) -> ModElem:
    return ModElem.basis(rank, index)


def mod_scale(p: Poly, v: ModElem) -> ModElem:
    return v.scale(p)


def mod_serialize(v: ModElem, basis: Optional[Sequence[str]] = None) -> str:
    """Canonical text of a module element.

    Without basis names the coordinates are listed as ``[p1, p2]``; with names the
    result is an expression such as ``(d + 2*l1)*L - M`` that parses back exactly.
    """
    if basis is None:
        return "[" + ", ".join(poly_serialize(a) for a in v.coords) + "]"
    if len(basis) != v.rank:
        raise DimensionError(f"{len(basis)} basis names for rank {v.rank}")

    pieces: List[str] = []
    for name, coeff in zip(basis, v.coords):
        if not coeff:
            continue
        terms = poly_terms(coeff)
        if len(terms) > 1:
            body, negative = f"({poly_serialize(coeff)})*{name}", False
        else:
            monom, c = terms[0]
            negative = c < 0
            magnitude = -c if negative else c
            if not any(monom) and magnitude == 1:
                body = name
            else:
                body = f"{_term_text(monom, magnitude)}*{name}"
        if not pieces:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f" - {body}" if negative else f" + {body}")
    return "".join(pieces) if pieces else "0"


Table = Dict[BasisTuple, ModElem]


def clean_table(table: Mapping[BasisTuple, ModElem]) -> Table:
    """Copy of ``table`` without zero entries, keys sorted."""
    return {key: table[key] for key in sorted(table) if not table[key].is_zero()}


def table_get(table: Mapping[BasisTuple, ModElem], key: BasisTuple, rank: int) -> ModElem:
    value = table.get(key)
    return ModElem.zero(rank) if value is None else value


def tables_equal(a: Mapping[BasisTuple, ModElem], b: Mapping[BasisTuple, ModElem]) -> bool:
    """Equality with missing entries read as zero."""
    return clean_table(a) == clean_table(b)


def sesquilinear_eval(
    table: Mapping[BasisTuple, ModElem],
    target_rank: int,
    args: Sequence[ModElem],
    lambdas: Sequence[Poly],
) -> ModElem:
    """Evaluate a map given on basis tuples at arbitrary module elements.

    Coefficients of the first ``len(args) - 1`` arguments get D -> -lambda_s, the
    coefficients of the last argument get D -> D + sum(lambdas), and table values
    get L_s -> lambda_s. Lambdas may mention D; it then acts on the final value.
    """
    arity = len(args)
    if arity < 1:
        raise DimensionError("evaluation needs at least one argument")
    if len(lambdas) != arity - 1:
        raise DegreeError(f"{arity}-ary map takes {arity - 1} lambdas, got {len(lambdas)}")

    total = lambda_sum(lambdas)
    slots: List[List[Tuple[int, Poly]]] = []
    for position, arg in enumerate(args):
        shift = D + total if position == arity - 1 else -lambdas[position]
        entries = [
            (index, poly_subst(coeff, {D: shift}))
            for index, coeff in enumerate(arg.coords)
            if coeff
        ]
        if not entries:
            return ModElem.zero(target_rank)
        slots.append(entries)

    value_bindings = {LAMBDAS[s]: POLY_RING(lambdas[s]) for s in range(arity - 1)}
    substituted: Dict[BasisTuple, ModElem] = {}
    result = [POLY_RING.zero] * target_rank

    for combo in product(*slots):
        key = tuple(index for index, _ in combo)
        value = table.get(key)
        if value is None:
            continue
        if value.rank != target_rank:
            raise DimensionError(f"table value at {key} has rank {value.rank}, expected {target_rank}")
        image = substituted.get(key)
        if image is None:
            image = substituted[key] = value.subst(value_bindings)
        factor = POLY_RING.one
        for _, coeff in combo:
            factor = factor * coeff
        for k, entry in enumerate(image.coords):
            if entry:
                result[k] = result[k] + factor * entry

    return ModElem(tuple(result))


def permutation_sign(perm: Sequence[int]) -> int:
    """Sign of a permutation given as a sequence of distinct integers."""
    sign = 1
    items = list(perm)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i] > items[j]:
                sign = -sign
    return sign
