import math

import numpy as np
import pytest

from vexlab.dsl import (Bin, BoolOp, Call, Chi, Cmp, EvalError, Neg, Num,
                        ParseError, Piecewise, Var, parse, to_source)


def test_parse_ast_shape():
    e = parse("2 - 1/(1+x^2)")
    assert isinstance(e, Bin) and e.op == "-"
    assert e.left == Num(2.0)
    assert isinstance(e.right, Bin) and e.right.op == "/"
    assert e.right.right == Bin("+", Num(1.0), Bin("^", Var("x"), Num(2.0)))


def test_parse_loglog_ratio():
    e = parse("2*loglog(x)/(loglog(x)-2)")
    assert isinstance(e, Bin) and e.op == "/"


def test_unbalanced_paren_offset():
    with pytest.raises(ParseError) as exc:
        parse("chi(0,1")
    assert exc.value.offset == 8
    assert "')'" in exc.value.expected


def test_unknown_identifier():
    with pytest.raises(ParseError):
        parse("foo(3)")
    with pytest.raises(ParseError):
        parse("y + 1")


def test_wrong_arity():
    with pytest.raises(ParseError):
        parse("min(1)")
    with pytest.raises(ParseError):
        parse("log(1, 2)")


def test_eval_simple():
    assert parse("2 - 1/(1+x^2)").eval(0.0) == 1.0


def test_eval_loglog_collapse():
    x = math.exp(math.exp(4.0))
    assert parse("2*loglog(x)/(loglog(x)-2)").eval(x) == pytest.approx(4.0, rel=1e-12)


def test_eval_loglog_near_domain_edge():
    # loglog(2) is real and negative; only x <= 1 is out of domain
    expected = math.log(math.log(2.0))
    assert parse("loglog(x)").eval(2.0) == pytest.approx(expected, rel=1e-12)
    for bad in (1.0, 0.5, -3.0):
        with pytest.raises(EvalError):
            parse("loglog(x)").eval(bad)


def test_division_by_zero_reports_subexpression():
    with pytest.raises(EvalError) as exc:
        parse("1/(x - 2)").eval(2.0)
    assert "x - 2" in exc.value.node_source
    assert exc.value.point == (2.0,)


def test_power_domain_errors():
    assert parse("(-2)^2").eval(0.0) == 4.0
    assert parse("x^-2").eval(2.0) == 0.25
    with pytest.raises(EvalError):
        parse("(-2)^0.5").eval(0.0)
    with pytest.raises(EvalError):
        parse("0^(-1)").eval(0.0)  # the literal exponent parses as Neg


def test_power_zero_base_via_variable():
    with pytest.raises(EvalError):
        parse("x^(0 - 1)").eval(0.0)


def test_chi_closed_interval():
    e = parse("chi(0, 1)")
    assert [e.eval(v) for v in (-0.1, 0.0, 0.5, 1.0, 1.1)] == [0, 1, 1, 1, 0]


def test_chi_literal_bounds_checked():
    with pytest.raises(ParseError):
        parse("chi(1, 0)")
    with pytest.raises(ParseError):
        parse("chi(x, 1)")


def test_chi_uses_first_coordinate_in_2d():
    e = parse("chi(-1, 1)")
    x1 = np.array([[0.0, 5.0]])
    x2 = np.array([[5.0, 0.0]])
    assert e(x1, x2).tolist() == [[1.0, 0.0]]


def test_var_x2_needs_2d_point():
    with pytest.raises(EvalError):
        parse("x2 + 1").eval(1.0)


def test_piecewise_matches_chi_form():
    pw = parse("piecewise(x >= 0 and x <= 1, 2, x >= 2 and x <= 3, 3, 2)")
    ch = parse("2 + chi(2, 3)")
    xs = np.linspace(-1.0, 4.0, 101)
    out_pw = pw(xs)
    out_ch = ch(xs)
    sel = (xs < 2) | (xs > 3)  # the chi form is 3 on [2,3], 2 elsewhere
    assert np.array_equal(out_pw[sel], out_ch[sel])


def test_piecewise_guards_untaken_branches():
    e = parse("piecewise(x > 0, 1/x, 0)")
    assert e.eval(0.0) == 0.0
    assert e.eval(2.0) == 0.5
    xs = np.array([-1.0, 0.0, 1.0, 4.0])
    assert e(xs).tolist() == [0.0, 0.0, 1.0, 0.25]


def test_piecewise_arity_checked():
    with pytest.raises(ParseError):
        parse("piecewise(x > 0, 1)")
    with pytest.raises(ParseError):
        parse("piecewise(x, 1, 2)")  # condition must be a comparison


def test_condition_not_a_value():
    with pytest.raises(EvalError):
        parse("(x > 1) + 2").eval(0.0)


def test_precedence():
    assert parse("2 + 3 * 4 ^ 2").eval(0.0) == 50.0
    assert parse("-x^2").eval(3.0) == -9.0
    assert parse("2 - 3 - 4").eval(0.0) == -5.0


_HAND_SOURCES = [
    "2 - 1/(1+x^2)",
    "2*loglog(x)/(loglog(x)-2)",
    "min(x, max(1, x^2)) + abs(-x)",
    "piecewise(x < 0 or x > 1, exp(-x), sqrt(x + 1))",
    "chi(-1, 1) * 3 - x/(x + 2)",
    "2^3^2",
    "-(x + 1) * -2",
]


@pytest.mark.parametrize("src", _HAND_SOURCES)
def test_roundtrip_hand_cases(src):
    e = parse(src)
    assert parse(to_source(e)) == e


# -- random ASTs: print/parse round trip and an independent evaluator -------

def _random_ast(rng, depth):
    if depth == 0 or rng.random() < 0.25:
        return rng.choice([Num(float(rng.integers(1, 5))), Var("x")])
    kind = rng.choice(["bin", "neg", "call", "chi", "pow"])
    if kind == "bin":
        op = rng.choice(["+", "-", "*", "/"])
        return Bin(op, _random_ast(rng, depth - 1), _random_ast(rng, depth - 1))
    if kind == "neg":
        return Neg(_random_ast(rng, depth - 1))
    if kind == "pow":
        return Bin("^", _random_ast(rng, depth - 1), Num(float(rng.integers(1, 4))))
    if kind == "chi":
        return Chi(-1.0, 2.0)
    name = rng.choice(["abs", "exp", "log", "sqrt", "loglog", "min", "max"])
    if name in ("min", "max"):
        return Call(name, (_random_ast(rng, depth - 1), _random_ast(rng, depth - 1)))
    return Call(name, (_random_ast(rng, depth - 1),))


def _reference_eval(node, x):
    """Independent tree walk over the math module (no numpy)."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return x
    if isinstance(node, Neg):
        return -_reference_eval(node.arg, x)
    if isinstance(node, Chi):
        return 1.0 if node.lo <= x <= node.hi else 0.0
    if isinstance(node, Bin):
        a, b = _reference_eval(node.left, x), _reference_eval(node.right, x)
        if node.op == "/" and b == 0:
            raise ZeroDivisionError
        if node.op == "^":
            if (a < 0 and b != int(b)) or (a == 0 and b < 0):
                raise ValueError
            return float(a) ** float(b)
        return {"+": a + b, "-": a - b, "*": a * b, "/": lambda: None}[node.op] \
            if node.op != "/" else a / b
    if isinstance(node, Call):
        args = [_reference_eval(a, x) for a in node.args]
        table = {"abs": abs, "exp": math.exp, "sqrt": math.sqrt,
                 "log": math.log, "min": min, "max": max,
                 "loglog": lambda v: math.log(math.log(v))}
        if node.name in ("log",) and args[0] <= 0:
            raise ValueError
        if node.name == "loglog" and args[0] <= 1:
            raise ValueError
        if node.name == "sqrt" and args[0] < 0:
            raise ValueError
        return float(table[node.name](*args))
    raise TypeError(node)


def test_random_ast_roundtrip_and_reference_eval():
    rng = np.random.default_rng(42)
    successes = 0
    attempts = 0
    while successes < 50 and attempts < 4000:
        attempts += 1
        e = _random_ast(rng, int(rng.integers(1, 7)))
        assert parse(to_source(e)) == e
        x = float(rng.uniform(0.3, 3.0))
        try:
            want = _reference_eval(e, x)
        except (ValueError, ZeroDivisionError, OverflowError):
            continue
        if not math.isfinite(want):
            continue
        got = e.eval(x)
        assert got == pytest.approx(want, rel=1e-12, abs=1e-12)
        successes += 1
    assert successes == 50


def test_vectorized_matches_scalar():
    rng = np.random.default_rng(11)
    xs = rng.uniform(1.5, 4.0, 64)  # inside every hand source's domain
    for src in _HAND_SOURCES:
        e = parse(src)
        vec = e(xs)
        for i, x in enumerate(xs):
            assert vec[i] == pytest.approx(e.eval(float(x)), rel=1e-13, abs=1e-13)
