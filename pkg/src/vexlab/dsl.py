"""Small expression DSL for exponents and test functions.

Grammar, precedence low to high: ``or``, ``and``, comparisons
(``< <= > >= =``), ``+ -``, ``* /``, unary ``-``, ``^`` (right
associative), atoms. Variables are ``x`` (first axis, usable in 2D too),
``x1`` and ``x2``. Functions: ``abs``, ``log``, ``exp``, ``sqrt``,
``min``, ``max``, ``loglog``, ``chi`` and ``piecewise``.

``chi(a, b)`` with literal bounds a < b is the indicator of the closed
interval [a, b] in the first coordinate. ``loglog(x) = log(log(x))`` is a
primitive with domain x > 1. ``piecewise(c1, v1, ..., ck, vk, v_else)``
takes alternating condition/value arguments and a final else value;
conditions are comparisons possibly joined by ``and``/``or`` and are only
legal in condition position.

Expressions are immutable and callable: ``expr(xs)`` (or ``expr(x1s,
x2s)``) evaluates vectorized over numpy arrays, ``expr.eval(point)``
evaluates at a single point. Domain errors raise `EvalError` carrying the
offending subexpression and coordinate; they never abort the process
beyond the raising call.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

__all__ = [
    "ParseError",
    "EvalError",
    "Expr",
    "Num",
    "Var",
    "Neg",
    "Bin",
    "Call",
    "Chi",
    "Cmp",
    "BoolOp",
    "Piecewise",
    "parse",
    "to_source",
]


class ParseError(ValueError):
    """Syntax error with a 1-based character offset into the source."""

    def __init__(self, offset: int, expected: str, source: str):
        self.offset = offset
        self.expected = expected
        lo = max(0, offset - 21)
        self.excerpt = source[lo : offset + 19]
        super().__init__(f"parse error at offset {offset}: expected {expected} "
                         f"(near {self.excerpt!r})")


class EvalError(ArithmeticError):
    """Domain error during evaluation, tagged with the subexpression and point."""

    def __init__(self, reason: str, node: "Expr", point):
        self.reason = reason
        self.node_source = to_source(node)
        self.point = point
        super().__init__(f"{reason} in {self.node_source!r} at {point}")


# --------------------------------------------------------------------------
# AST
# --------------------------------------------------------------------------

class Expr:
    """Base class for AST nodes; immutable and shareable."""

    def eval(self, point) -> float:
        pt = tuple(float(v) for v in np.atleast_1d(point))
        out = _eval(self, tuple(np.asarray([v]) for v in pt))
        return float(out[0])

    def __call__(self, *coords):
        arrs = tuple(np.asarray(c, dtype=float) for c in coords)
        return _eval(self, arrs)

    def source(self) -> str:
        return to_source(self)


@dataclass(frozen=True)
class Num(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    name: str  # "x", "x1" or "x2"


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True)
class Bin(Expr):
    op: str  # + - * / ^
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call(Expr):
    name: str
    args: tuple


@dataclass(frozen=True)
class Chi(Expr):
    lo: float
    hi: float


@dataclass(frozen=True)
class Cmp(Expr):
    op: str  # < <= > >= =
    left: Expr
    right: Expr


@dataclass(frozen=True)
class BoolOp(Expr):
    op: str  # and / or
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Piecewise(Expr):
    branches: tuple  # of (cond, value) pairs
    otherwise: Expr


_FUNCTIONS = {"abs": 1, "log": 1, "exp": 1, "sqrt": 1, "min": 2, "max": 2, "loglog": 1}
_VARIABLES = {"x", "x1", "x2"}


# --------------------------------------------------------------------------
# Tokenizer / parser
# --------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op><=|>=|[<>=+\-*/^(),]))"
)


def _tokenize(src: str):
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if m is None or m.end() == pos:
            stripped = src[pos:].lstrip()
            if not stripped:
                break
            bad_at = pos + (len(src[pos:]) - len(stripped)) + 1
            raise ParseError(bad_at, "a token", src)
        kind = m.lastgroup
        text = m.group(kind)
        tokens.append((kind, text, m.start(kind) + 1))
        pos = m.end()
    tokens.append(("end", "", len(src) + 1))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str):
        kind, val, off = self.peek()
        if val != text:
            raise ParseError(off, repr(text), self.src)
        return self.advance()

    def fail(self, expected: str):
        raise ParseError(self.peek()[2], expected, self.src)

    # precedence ladder ----------------------------------------------------

    def parse_or(self) -> Expr:
        node = self.parse_and()
        while self.peek()[1] == "or":
            self.advance()
            node = BoolOp("or", node, self.parse_and())
        return node

    def parse_and(self) -> Expr:
        node = self.parse_cmp()
        while self.peek()[1] == "and":
            self.advance()
            node = BoolOp("and", node, self.parse_cmp())
        return node

    def parse_cmp(self) -> Expr:
        node = self.parse_sum()
        if self.peek()[1] in ("<", "<=", ">", ">=", "="):
            op = self.advance()[1]
            node = Cmp(op, node, self.parse_sum())
        return node

    def parse_sum(self) -> Expr:
        node = self.parse_term()
        while self.peek()[1] in ("+", "-"):
            op = self.advance()[1]
            node = Bin(op, node, self.parse_term())
        return node

    def parse_term(self) -> Expr:
        node = self.parse_unary()
        while self.peek()[1] in ("*", "/"):
            op = self.advance()[1]
            node = Bin(op, node, self.parse_unary())
        return node

    def parse_unary(self) -> Expr:
        if self.peek()[1] == "-":
            self.advance()
            return Neg(self.parse_unary())
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        if self.peek()[1] == "^":
            self.advance()
            return Bin("^", base, self.parse_unary())
        return base

    def parse_atom(self) -> Expr:
        kind, text, off = self.peek()
        if kind == "num":
            self.advance()
            return Num(float(text))
        if text == "(":
            self.advance()
            node = self.parse_or()
            self.expect(")")
            return node
        if kind == "ident":
            self.advance()
            if self.peek()[1] != "(":
                if text in _VARIABLES:
                    return Var(text)
                raise ParseError(off, "a variable (x, x1, x2) or function call", self.src)
            return self.parse_call(text, off)
        self.fail("a number, variable, function call or '('")

    def parse_call(self, name: str, off: int) -> Expr:
        self.expect("(")
        args = [self.parse_or()]
        while self.peek()[1] == ",":
            self.advance()
            args.append(self.parse_or())
        self.expect(")")
        if name == "chi":
            return self._make_chi(args, off)
        if name == "piecewise":
            return self._make_piecewise(args, off)
        if name not in _FUNCTIONS:
            raise ParseError(off, f"a known function (unknown identifier {name!r})", self.src)
        if len(args) != _FUNCTIONS[name]:
            raise ParseError(off, f"{_FUNCTIONS[name]} argument(s) to {name}", self.src)
        return Call(name, tuple(args))

    def _make_chi(self, args, off) -> Expr:
        if len(args) != 2:
            raise ParseError(off, "2 literal bounds to chi", self.src)
        bounds = []
        for a in args:
            if isinstance(a, Num):
                bounds.append(a.value)
            elif isinstance(a, Neg) and isinstance(a.arg, Num):
                bounds.append(-a.arg.value)
            else:
                raise ParseError(off, "literal bounds in chi(a, b)", self.src)
        if not bounds[0] < bounds[1]:
            raise ParseError(off, "chi bounds with a < b", self.src)
        return Chi(bounds[0], bounds[1])

    def _make_piecewise(self, args, off) -> Expr:
        if len(args) < 3 or len(args) % 2 == 0:
            raise ParseError(
                off, "piecewise(cond1, val1, ..., else) with an odd argument count >= 3",
                self.src,
            )
        branches = []
        for k in range(0, len(args) - 1, 2):
            cond, val = args[k], args[k + 1]
            if not isinstance(cond, (Cmp, BoolOp)):
                raise ParseError(off, "a comparison as piecewise condition", self.src)
            _reject_condition(val, off, self.src)
            branches.append((cond, val))
        _reject_condition(args[-1], off, self.src)
        return Piecewise(tuple(branches), args[-1])


def _reject_condition(node: Expr, off: int, src: str) -> None:
    if isinstance(node, (Cmp, BoolOp)):
        raise ParseError(off, "a value expression (found a condition)", src)


def parse(src: str) -> Expr:
    """Parse source text into an AST; raises `ParseError` on bad input."""
    p = _Parser(src)
    node = p.parse_or()
    kind, text, off = p.peek()
    if kind != "end":
        raise ParseError(off, "end of input", src)
    return node


# --------------------------------------------------------------------------
# Evaluation (vectorized; scalar eval goes through 1-element arrays)
# --------------------------------------------------------------------------

def _point_of(coords, flat_index: int):
    if len(coords) == 1:
        return (float(coords[0].ravel()[flat_index]),)
    return tuple(float(c.ravel()[flat_index]) for c in coords)


def _raise_where(bad: np.ndarray, reason: str, node: Expr, coords) -> None:
    idx = int(np.argmax(bad.ravel()))
    raise EvalError(reason, node, _point_of(coords, idx))


def _var_array(node: Var, coords):
    if node.name in ("x", "x1"):
        return coords[0]
    if len(coords) < 2:
        raise EvalError("variable x2 used with a 1D point", node, _point_of(coords, 0))
    return coords[1]


def _eval(node: Expr, coords) -> np.ndarray:
    shape = np.broadcast_shapes(*(c.shape for c in coords)) if coords else ()
    coords = tuple(np.broadcast_to(c, shape) for c in coords)
    out = _eval_rec(node, coords)
    return np.broadcast_to(out, shape).astype(float, copy=False)


def _eval_rec(node: Expr, coords) -> np.ndarray:
    if isinstance(node, Num):
        return np.full(coords[0].shape, node.value)
    if isinstance(node, Var):
        return _var_array(node, coords)
    if isinstance(node, Neg):
        return -_eval_rec(node.arg, coords)
    if isinstance(node, Bin):
        return _eval_bin(node, coords)
    if isinstance(node, Call):
        return _eval_call(node, coords)
    if isinstance(node, Chi):
        x = coords[0]
        return np.where((x >= node.lo) & (x <= node.hi), 1.0, 0.0)
    if isinstance(node, Piecewise):
        return _eval_piecewise(node, coords)
    if isinstance(node, (Cmp, BoolOp)):
        raise EvalError("condition used as a value", node, _point_of(coords, 0))
    raise TypeError(f"unknown node {node!r}")


def _eval_bin(node: Bin, coords) -> np.ndarray:
    a = _eval_rec(node.left, coords)
    b = _eval_rec(node.right, coords)
    if node.op == "+":
        return a + b
    if node.op == "-":
        return a - b
    if node.op == "*":
        return a * b
    if node.op == "/":
        bad = b == 0.0
        if bad.any():
            _raise_where(bad, "division by zero", node, coords)
        return a / b
    if node.op == "^":
        # real result required: negative base needs an integer exponent,
        # zero base a nonnegative one
        bad = (a < 0) & (b != np.floor(b))
        if bad.any():
            _raise_where(bad, "non-real power (negative base, non-integer exponent)",
                         node, coords)
        bad = (a == 0) & (b < 0)
        if bad.any():
            _raise_where(bad, "zero raised to a negative power", node, coords)
        with np.errstate(over="ignore"):
            return np.power(a, b)
    raise TypeError(f"unknown operator {node.op!r}")


def _eval_call(node: Call, coords) -> np.ndarray:
    args = [_eval_rec(a, coords) for a in node.args]
    name = node.name
    if name == "abs":
        return np.abs(args[0])
    if name == "exp":
        with np.errstate(over="ignore"):
            return np.exp(args[0])
    if name == "log":
        bad = args[0] <= 0.0
        if bad.any():
            _raise_where(bad, "log of a non-positive argument", node, coords)
        return np.log(args[0])
    if name == "loglog":
        bad = args[0] <= 1.0
        if bad.any():
            _raise_where(bad, "loglog needs an argument > 1", node, coords)
        return np.log(np.log(args[0]))
    if name == "sqrt":
        bad = args[0] < 0.0
        if bad.any():
            _raise_where(bad, "sqrt of a negative argument", node, coords)
        return np.sqrt(args[0])
    if name == "min":
        return np.minimum(args[0], args[1])
    if name == "max":
        return np.maximum(args[0], args[1])
    raise TypeError(f"unknown function {name!r}")


def _eval_cond(node: Expr, coords) -> np.ndarray:
    if isinstance(node, Cmp):
        a = _eval_rec(node.left, coords)
        b = _eval_rec(node.right, coords)
        return {
            "<": a < b, "<=": a <= b, ">": a > b, ">=": a >= b, "=": a == b,
        }[node.op]
    if isinstance(node, BoolOp):
        a = _eval_cond(node.left, coords)
        b = _eval_cond(node.right, coords)
        return a & b if node.op == "and" else a | b
    raise EvalError("expected a condition", node, _point_of(coords, 0))


def _eval_piecewise(node: Piecewise, coords) -> np.ndarray:
    shape = coords[0].shape
    out = np.zeros(shape)
    remaining = np.ones(shape, bool)
    # each branch is evaluated only where selected, so domain errors in
    # untaken branches cannot fire
    for cond, val in node.branches:
        sel = _eval_cond(cond, coords) & remaining
        if sel.any():
            sub = tuple(c[sel] for c in coords)
            out[sel] = _eval_rec(val, sub)
            remaining &= ~sel
    if remaining.any():
        sub = tuple(c[remaining] for c in coords)
        out[remaining] = _eval_rec(node.otherwise, sub)
    return out


# --------------------------------------------------------------------------
# Canonical pretty-printer (parse(to_source(e)) is structurally equal to e)
# --------------------------------------------------------------------------

_PREC = {"or": 1, "and": 2, "cmp": 3, "+": 4, "-": 4, "*": 5, "/": 5,
         "neg": 6, "^": 7, "atom": 9}


def _render(node: Expr) -> tuple[int, str]:
    if isinstance(node, Num):
        return _PREC["atom"], repr(node.value)
    if isinstance(node, Var):
        return _PREC["atom"], node.name
    if isinstance(node, Neg):
        p, s = _render(node.arg)
        if p < _PREC["neg"]:
            s = f"({s})"
        return _PREC["neg"], f"-{s}"
    if isinstance(node, Bin):
        prec = _PREC[node.op]
        lp, ls = _render(node.left)
        rp, rs = _render(node.right)
        if node.op == "^":
            if lp <= prec:  # power binds right; parenthesize non-atomic bases
                ls = f"({ls})"
            if rp < _PREC["neg"]:
                rs = f"({rs})"
        else:
            if lp < prec:
                ls = f"({ls})"
            if rp <= prec:  # left-assoc: parenthesize equal-precedence right sides
                rs = f"({rs})"
        return prec, f"{ls} {node.op} {rs}"
    if isinstance(node, Chi):
        return _PREC["atom"], f"chi({node.lo!r}, {node.hi!r})"
    if isinstance(node, Call):
        args = ", ".join(_render(a)[1] for a in node.args)
        return _PREC["atom"], f"{node.name}({args})"
    if isinstance(node, Cmp):
        prec = _PREC["cmp"]
        lp, ls = _render(node.left)
        rp, rs = _render(node.right)
        if lp <= prec:
            ls = f"({ls})"
        if rp <= prec:
            rs = f"({rs})"
        return prec, f"{ls} {node.op} {rs}"
    if isinstance(node, BoolOp):
        prec = _PREC[node.op]
        lp, ls = _render(node.left)
        rp, rs = _render(node.right)
        if lp < prec:
            ls = f"({ls})"
        if rp <= prec:
            rs = f"({rs})"
        return prec, f"{ls} {node.op} {rs}"
    if isinstance(node, Piecewise):
        parts = []
        for cond, val in node.branches:
            parts.append(_render(cond)[1])
            parts.append(_render(val)[1])
        parts.append(_render(node.otherwise)[1])
        return _PREC["atom"], "piecewise(" + ", ".join(parts) + ")"
    raise TypeError(f"unknown node {node!r}")


def to_source(node: Expr) -> str:
    """Canonical text form; reparsing yields a structurally equal AST."""
    return _render(node)[1]
