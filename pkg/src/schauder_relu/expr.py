"""A small expression language for target functions f: [0, 1] -> R.

Grammar (lowest to highest precedence)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" unary)?          # right associative
    atom   := NUMBER | "x" | "pi" | NAME "(" expr ("," expr)* ")" | "(" expr ")"

so ``-x^2`` is ``-(x^2)`` and ``2^3^2`` is ``2^(3^2)``. Implicit
multiplication is not supported.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, Union

import numpy as np

MAX_DEPTH = 100


class ExprError(Exception):
    pass


class ParseError(ExprError):
    """Syntax, unknown identifier or arity error at a byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class DomainError(ExprError):
    """Evaluation left the real domain of a function or operator."""

    def __init__(self, message: str, subexpr: str, x: float):
        super().__init__(f"{message} in {subexpr} at x={x!r}")
        self.subexpr = subexpr
        self.x = x


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str  # "x" or "pi"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple["Expr", ...]


Expr = Union[Num, Var, Neg, BinOp, Call]

ARITY = {
    "sin": 1, "cos": 1, "exp": 1, "ln": 1, "abs": 1, "sqrt": 1, "relu": 1,
    "min": 2, "max": 2,
}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass
class _Token:
    kind: str
    text: str
    offset: int


def _byte_offset(src: str, i: int) -> int:
    return len(src[:i].encode("utf-8"))


def _tokenize(src: str) -> list[_Token]:
    tokens = []
    i = 0
    while i < len(src):
        m = _TOKEN.match(src, i)
        if m is None:
            raise ParseError(f"unexpected character {src[i]!r}", _byte_offset(src, i))
        if m.lastgroup != "ws":
            tokens.append(_Token(m.lastgroup, m.group(), _byte_offset(src, i)))
        i = m.end()
    tokens.append(_Token("end", "", _byte_offset(src, len(src))))
    return tokens


@dataclass
class _Parser:
    tokens: list[_Token]
    pos: int = 0
    depth: int = field(default=0)

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.peek()
        if tok.text != text or tok.kind == "end":
            got = "end of input" if tok.kind == "end" else repr(tok.text)
            raise ParseError(f"expected {text!r}, got {got}", tok.offset)
        return self.advance()

    def descend(self, tok: _Token):
        self.depth += 1
        if self.depth > MAX_DEPTH:
            raise ParseError("expression nested too deeply", tok.offset)

    def expr(self) -> Expr:
        node = self.term()
        while self.peek().text in ("+", "-") and self.peek().kind == "op":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.peek().text in ("*", "/") and self.peek().kind == "op":
            op = self.advance().text
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        tok = self.peek()
        if tok.kind == "op" and tok.text == "-":
            self.advance()
            self.descend(tok)
            node = Neg(self.unary())
            self.depth -= 1
            return node
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        tok = self.peek()
        if tok.kind == "op" and tok.text == "^":
            self.advance()
            self.descend(tok)
            exponent = self.unary()
            self.depth -= 1
            return BinOp("^", base, exponent)
        return base

    def atom(self) -> Expr:
        tok = self.advance()
        if tok.kind == "num":
            value = float(tok.text)
            if not math.isfinite(value):
                raise ParseError(f"numeric literal {tok.text!r} overflows", tok.offset)
            return Num(value)
        if tok.kind == "name":
            if tok.text in ("x", "pi"):
                return Var(tok.text)
            if tok.text not in ARITY:
                raise ParseError(f"unknown identifier {tok.text!r}", tok.offset)
            return self.call(tok)
        if tok.kind == "op" and tok.text == "(":
            self.descend(tok)
            node = self.expr()
            self.expect(")")
            self.depth -= 1
            return node
        got = "end of input" if tok.kind == "end" else repr(tok.text)
        raise ParseError(f"unexpected {got}", tok.offset)

    def call(self, name_tok: _Token) -> Expr:
        self.expect("(")
        self.descend(name_tok)
        args = [self.expr()]
        while self.peek().kind == "op" and self.peek().text == ",":
            self.advance()
            args.append(self.expr())
        self.expect(")")
        self.depth -= 1
        want = ARITY[name_tok.text]
        if len(args) != want:
            raise ParseError(
                f"{name_tok.text} takes {want} argument(s), got {len(args)}",
                name_tok.offset,
            )
        return Call(name_tok.text, tuple(args))


def parse(src: str) -> Expr:
    """Parse ``src`` into an immutable AST. Raises ParseError."""
    if not isinstance(src, str):
        raise TypeError("expression source must be str")
    if src.strip() == "":
        raise ParseError("empty expression", 0)
    parser = _Parser(_tokenize(src))
    node = parser.expr()
    tok = parser.peek()
    if tok.kind != "end":
        raise ParseError(f"unexpected {tok.text!r}", tok.offset)
    return node


def to_source(e: Expr) -> str:
    """Fully parenthesized source text; ``parse(to_source(e)) == e``."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_source(e.operand)})"
    if isinstance(e, BinOp):
        return f"({to_source(e.left)} {e.op} {to_source(e.right)})"
    if isinstance(e, Call):
        return f"{e.name}({', '.join(to_source(a) for a in e.args)})"
    raise TypeError(f"not an expression node: {e!r}")


def _fail(mask, x, message, node):
    if np.any(mask):
        bad = np.broadcast_to(x, np.shape(mask))[mask]
        raise DomainError(message, to_source(node), float(bad.flat[0]))


def _eval(e: Expr, x: np.ndarray) -> np.ndarray:
    if isinstance(e, Num):
        return np.full_like(x, e.value)
    if isinstance(e, Var):
        return x.copy() if e.name == "x" else np.full_like(x, math.pi)
    if isinstance(e, Neg):
        return -_eval(e.operand, x)
    if isinstance(e, BinOp):
        left, right = _eval(e.left, x), _eval(e.right, x)
        if e.op == "+":
            out = left + right
        elif e.op == "-":
            out = left - right
        elif e.op == "*":
            out = left * right
        elif e.op == "/":
            _fail(right == 0.0, x, "division by zero", e)
            out = left / right
        else:
            integral = right == np.round(right)
            _fail((left < 0) & ~integral, x, "negative base with non-integer exponent", e)
            _fail((left == 0) & (right < 0), x, "zero raised to a negative power", e)
            out = np.power(left, right)
    else:
        args = [_eval(a, x) for a in e.args]
        name = e.name
        if name == "ln":
            _fail(args[0] <= 0, x, "ln of non-positive value", e)
            out = np.log(args[0])
        elif name == "sqrt":
            _fail(args[0] < 0, x, "sqrt of negative value", e)
            out = np.sqrt(args[0])
        elif name == "relu":
            out = np.maximum(args[0], 0.0)
        elif name == "min":
            out = np.minimum(args[0], args[1])
        elif name == "max":
            out = np.maximum(args[0], args[1])
        else:
            out = getattr(np, name)(args[0])
    _fail(~np.isfinite(out), x, "non-finite result", e)
    return out


def evaluate(e: Expr, x):
    """Evaluate ``e`` at ``x`` (scalar or array) in [0, 1].

    Raises DomainError naming the offending subexpression and x.
    """
    arr = np.asarray(x, dtype=float)
    outside = ~np.isfinite(arr) | (arr < 0.0) | (arr > 1.0)
    if np.any(outside):
        raise ValueError(f"x={float(arr[outside].flat[0])!r} outside [0, 1]")
    flat = np.atleast_1d(arr).astype(float)
    with np.errstate(all="ignore"):
        out = _eval(e, flat)
    if np.ndim(x) == 0:
        return float(out[0])
    return out.reshape(arr.shape)


@dataclass(frozen=True)
class Tabulated:
    """Samples on a sorted grid containing 0 and 1; linear in between."""

    xs: tuple[float, ...]
    ys: tuple[float, ...]

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=float)
        if len(self.xs) != len(self.ys) or len(xs) < 2:
            raise ValueError("tabulated function needs matching xs, ys of length >= 2")
        if xs[0] != 0.0 or xs[-1] != 1.0 or np.any(np.diff(xs) <= 0):
            raise ValueError("tabulated grid must be strictly increasing from 0 to 1")

    def __call__(self, x):
        out = np.interp(np.asarray(x, dtype=float), self.xs, self.ys)
        return float(out) if np.ndim(x) == 0 else out


@dataclass(frozen=True)
class Func1D:
    """An evaluable target on [0, 1] with an optional Lipschitz constant.

    ``body`` is an expression AST, a :class:`Tabulated`, or any vectorized
    callable.
    """

    body: Union[Expr, Tabulated, Callable]
    lipschitz: float | None = None
    label: str = ""

    def __post_init__(self):
        if self.lipschitz is not None and not self.lipschitz > 0:
            raise ValueError(f"Lipschitz constant must be positive, got {self.lipschitz}")

    @classmethod
    def from_source(cls, src: str, lipschitz: float | None = None) -> "Func1D":
        return cls(parse(src), lipschitz, label=src)

    @classmethod
    def from_samples(cls, xs, ys, lipschitz: float | None = None) -> "Func1D":
        return cls(Tabulated(tuple(map(float, xs)), tuple(map(float, ys))), lipschitz)

    def __call__(self, x):
        if isinstance(self.body, (Num, Var, Neg, BinOp, Call)):
            return evaluate(self.body, x)
        return self.body(x)
