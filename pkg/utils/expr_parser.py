# utils/expr_parser.py
"""Recursive descent parser for polynomial and module-element expressions.

Grammar (whitespace is insignificant)::

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := '-' factor | atom ('^' uint)?
    atom   := rational | 'd' | 'l1'..'l9' | IDENT | '(' expr ')'

IDENT is an uppercase-initial basis symbol. Unary minus binds looser than '^',
so "-d^2" reads as -(d^2).
"""
import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Union

from sympy import QQ

from core.errors import ExprSyntaxError
from core.symalg import D, POLY_RING, ModElem, Poly, lam

TOKEN_PATTERN = re.compile(
    r"\s*(?:(?P<number>\d+(?:\s*/\s*\d+)?)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^()]))"
)
LAMBDA_NAME = re.compile(r"l([1-9])")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    offset: int


@dataclass(frozen=True)
class Num:
    value: object
    offset: int


@dataclass(frozen=True)
class Var:
    """d (index 0) or l1..l9 (index k)."""

    index: int
    offset: int


@dataclass(frozen=True)
class Sym:
    name: str
    offset: int


@dataclass(frozen=True)
class Neg:
    operand: "ExprNode"
    offset: int


@dataclass(frozen=True)
class Add:
    left: "ExprNode"
    right: "ExprNode"
    negate_right: bool
    offset: int


@dataclass(frozen=True)
class Mul:
    left: "ExprNode"
    right: "ExprNode"
    offset: int


@dataclass(frozen=True)
class Pow:
    base: "ExprNode"
    exponent: int
    offset: int


ExprNode = Union[Num, Var, Sym, Neg, Add, Mul, Pow]


def _byte_offset(text: str, position: int) -> int:
    return len(text[:position].encode("utf-8"))


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    position = 0
    while position < len(text):
        if text[position:].strip() == "":
            break
        match = TOKEN_PATTERN.match(text, position)
        if match is None:
            offset = position + len(text[position:]) - len(text[position:].lstrip())
            raise ExprSyntaxError(
                f"unexpected character {text[offset]!r}", _byte_offset(text, offset), text
            )
        kind = match.lastgroup or "op"
        start = match.start(kind)
        tokens.append(Token(kind, match.group(kind), _byte_offset(text, start)))
        position = match.end()
    tokens.append(Token("end", "", _byte_offset(text, len(text))))
    return tokens


class Parser:
    """One-token-lookahead parser producing an expression tree."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.position = 0

    @property
    def current(self) -> Token:
        return self.tokens[self.position]

    def _advance(self) -> Token:
        token = self.current
        self.position += 1
        return token

    def _error(self, message: str, token: Optional[Token] = None) -> ExprSyntaxError:
        token = token or self.current
        return ExprSyntaxError(message, token.offset, self.text)

    def _is_op(self, symbol: str) -> bool:
        return self.current.kind == "op" and self.current.text == symbol

    def parse(self) -> ExprNode:
        if self.current.kind == "end":
            raise self._error("empty expression")
        node = self.expr()
        if self.current.kind != "end":
            raise self._error(f"unexpected {self.current.text!r}")
        return node

    def expr(self) -> ExprNode:
        node = self.term()
        while self._is_op("+") or self._is_op("-"):
            op = self._advance()
            node = Add(node, self.term(), op.text == "-", op.offset)
        return node

    def term(self) -> ExprNode:
        node = self.factor()
        while self._is_op("*"):
            op = self._advance()
            node = Mul(node, self.factor(), op.offset)
        return node

    def factor(self) -> ExprNode:
        if self._is_op("-"):
            op = self._advance()
            return Neg(self.factor(), op.offset)
        node = self.atom()
        if self._is_op("^"):
            op = self._advance()
            exponent = self.current
            if exponent.kind != "number" or "/" in exponent.text:
                raise self._error("exponent must be a nonnegative integer literal")
            self._advance()
            node = Pow(node, int(exponent.text), op.offset)
        return node

    def atom(self) -> ExprNode:
        token = self.current
        if token.kind == "number":
            self._advance()
            numerator, _, denominator = token.text.partition("/")
            if denominator and int(denominator) == 0:
                raise self._error("zero denominator", token)
            value = QQ(int(numerator), int(denominator) if denominator else 1)
            return Num(value, token.offset)
        if token.kind == "name":
            self._advance()
            if token.text == "d":
                return Var(0, token.offset)
            lambda_match = LAMBDA_NAME.fullmatch(token.text)
            if lambda_match:
                return Var(int(lambda_match.group(1)), token.offset)
            if token.text[0].isupper():
                return Sym(token.text, token.offset)
            raise self._error(f"unknown variable {token.text!r}", token)
        if self._is_op("("):
            self._advance()
            node = self.expr()
            if not self._is_op(")"):
                raise self._error("expected ')'")
            self._advance()
            return node
        if token.kind == "end":
            raise self._error("unexpected end of expression")
        raise self._error(f"unexpected {token.text!r}")


def parse_expr(text: str) -> ExprNode:
    return Parser(text).parse()


# Expanded value: basis index (None for the scalar part) -> coefficient.
Expanded = Dict[Optional[int], Poly]


def _combine(left: Expanded, right: Expanded, sign: int) -> Expanded:
    out = dict(left)
    for key, value in right.items():
        out[key] = out.get(key, POLY_RING.zero) + value * sign
    return {key: value for key, value in out.items() if value}


class _Expander:
    def __init__(self, text: str, basis: Sequence[str]):
        self.text = text
        self.index = {name: k for k, name in enumerate(basis)}

    def expand(self, node: ExprNode) -> Expanded:
        if isinstance(node, Num):
            return {None: POLY_RING(node.value)} if node.value else {}
        if isinstance(node, Var):
            return {None: D if node.index == 0 else lam(node.index)}
        if isinstance(node, Sym):
            if node.name not in self.index:
                raise ExprSyntaxError(f"unknown basis symbol {node.name!r}", node.offset, self.text)
            return {self.index[node.name]: POLY_RING.one}
        if isinstance(node, Neg):
            return {key: -value for key, value in self.expand(node.operand).items()}
        if isinstance(node, Add):
            return _combine(self.expand(node.left), self.expand(node.right), -1 if node.negate_right else 1)
        if isinstance(node, Mul):
            return self._multiply(self.expand(node.left), self.expand(node.right), node.offset)
        base = self.expand(node.base)
        result: Expanded = {None: POLY_RING.one}
        for _ in range(node.exponent):
            result = self._multiply(result, base, node.offset)
        return result

    def _multiply(self, left: Expanded, right: Expanded, offset: int) -> Expanded:
        out: Expanded = {}
        for (lk, lv), (rk, rv) in ((a, b) for a in left.items() for b in right.items()):
            if lk is not None and rk is not None:
                raise ExprSyntaxError("two basis symbols in one monomial", offset, self.text)
            key = lk if lk is not None else rk
            out[key] = out.get(key, POLY_RING.zero) + lv * rv
        return {key: value for key, value in out.items() if value}


def parse_poly(text: str) -> Poly:
    """A scalar expression in d, l1..l9."""
    expanded = _Expander(text, ()).expand(parse_expr(text))
    return expanded.get(None, POLY_RING.zero)


def parse_module_element(text: str, basis: Sequence[str]) -> ModElem:
    """An expression such as "(d + 2*l1)*L - M" over the given basis symbols."""
    expanded = _Expander(text, basis).expand(parse_expr(text))
    if expanded.get(None):
        raise ExprSyntaxError("scalar term in a module element", 0, text)
    coords = [POLY_RING.zero] * len(basis)
    for key, value in expanded.items():
        if key is not None:
            coords[key] = value
    return ModElem(tuple(coords))


def parse_coordinates(items: Sequence[str]) -> ModElem:
    """A module element given as one scalar expression per coordinate."""
    return ModElem(tuple(parse_poly(item) for item in items))
