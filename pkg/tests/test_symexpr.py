import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bondgraph.errors import EvaluationError, ExprError, ParseError
from bondgraph.symexpr import (
    TIME, SymbolTable, apply, as_expr, const, differentiate, dstate, effort,
    equal_mod_scale, evaluate, evaluate_exact, flow, lambdify, linear_split,
    param, parse_expr, state, substitute,
)

x0, x1, x2 = (as_expr(state(i)) for i in range(3))


def test_hamiltonian_expands_to_four_terms():
    ctx = SymbolTable({"w": param("w"), "G": param("G")})
    e = parse_expr("(w + G*x_0)*(x_1^2 + x_2^2)/2", ctx)
    w, G = as_expr(param("w")), as_expr(param("G"))
    expected = w * x1**2 / 2 + w * x2**2 / 2 + G * x0 * x1**2 / 2 + G * x0 * x2**2 / 2
    assert e == expected
    assert len(e.terms) == 4


def test_numbers_are_exact():
    assert parse_expr("0.1").constant_value == Fraction(1, 10)
    assert parse_expr("1/freq", {"freq": const(Fraction(17, 10))}).constant_value == Fraction(10, 17)
    assert parse_expr("2^-1").constant_value == Fraction(1, 2)


def test_double_star_is_power():
    assert parse_expr("x_1**2") == parse_expr("x_1^2")


def test_precedence():
    # ^ binds tighter than unary minus
    assert parse_expr("-x_0^2") == -(x0 ** 2)
    assert parse_expr("2*x_0 - 3*x_1/2") == 2 * x0 - Fraction(3, 2) * x1


@pytest.mark.parametrize("text", ["x_0 +", "(x_0", "sin(", "3 $ 4", "x_0 x_1"])
def test_syntax_errors_carry_position(text):
    with pytest.raises(ParseError) as info:
        parse_expr(text)
    assert info.value.position is not None


def test_unknown_name_and_function():
    with pytest.raises(ParseError):
        parse_expr("omega*x_0")
    with pytest.raises(ParseError):
        parse_expr("frob(x_0)")
    with pytest.raises(ParseError):
        parse_expr("sin(x_0, x_1)")


def test_control_string():
    e = parse_expr("sin(t)", SymbolTable({"t": TIME}, coordinates=False))
    assert e.symbols() == {TIME}
    assert evaluate(e, {TIME: math.pi / 2}) == pytest.approx(1.0)


def test_like_terms_collect_and_cancel():
    assert (x0 + x1 - x0).symbols() == {state(1)}
    assert (x0 - x0).is_zero
    assert str(x0 * 2 + x0) == "3*x_0"


def test_print_order_follows_coordinates():
    e = parse_expr("x_1 + e_0 + dx_3 + 6*x_2*x_0 + f_0 + u_0")
    assert str(e) == "dx_3 + e_0 + f_0 + 6*x_0*x_2 + x_1 + u_0"


def test_differentiate():
    e = parse_expr("x_0^3 + sin(x_1)*x_0")
    assert differentiate(e, state(0)) == parse_expr("3*x_0^2 + sin(x_1)")
    assert differentiate(e, state(1)) == parse_expr("cos(x_1)*x_0")
    assert differentiate(parse_expr("exp(2*x_0)"), state(0)) == parse_expr("2*exp(2*x_0)")
    assert differentiate(e, state(2)).is_zero


def test_substitute_is_simultaneous():
    e = parse_expr("x_0 + 2*x_1")
    out = substitute(e, {state(0): x1, state(1): x0}, check=False)
    assert out == parse_expr("x_1 + 2*x_0")


def test_substitute_rejects_cycles():
    with pytest.raises(ExprError):
        substitute(x0, {state(0): x1 + 1, state(1): x0})


def test_substitute_into_functions():
    e = parse_expr("sin(x_0) + x_0")
    assert substitute(e, {state(0): const(0)}).is_zero


def test_linear_split():
    coords = [dstate(0), effort(0), flow(0), state(0)]
    e = parse_expr("dx_0 - e_0 + x_0*x_1 + 6*x_0")
    row, rest = linear_split(e, coords)
    assert {i: str(v) for i, v in row.items()} == {0: "1", 1: "-1", 3: "6"}
    assert rest == x0 * x1


def test_linear_split_keeps_parameter_coefficients():
    r = as_expr(param("r"))
    row, rest = linear_split(effort(0) - r * flow(0), [effort(0), flow(0)])
    assert row[1] == -r and rest.is_zero


def test_equal_mod_scale():
    a = parse_expr("dx_0 - x_1")
    assert equal_mod_scale(a, -3 * a)
    assert not equal_mod_scale(a, parse_expr("dx_0 + x_1"))
    assert equal_mod_scale(const(0), const(0))


def test_evaluate_domain_errors():
    with pytest.raises(EvaluationError):
        evaluate(parse_expr("log(x_0)"), {state(0): -1.0})
    with pytest.raises(EvaluationError):
        evaluate(parse_expr("1/x_0"), {state(0): 0.0})
    with pytest.raises(EvaluationError):
        evaluate(x0, {})


def test_evaluate_exact():
    assert evaluate_exact(parse_expr("x_0^2/3 + 1/7"), {state(0): Fraction(1, 2)}) == Fraction(19, 84)


def test_lambdify_matches_evaluate():
    e = parse_expr("sin(x_0)*x_1 + exp(-t) + 17*x_1/10")
    fn = lambdify([e], {state(0): "x[0]", state(1): "x[1]", TIME: "t"}, ("t", "x"))
    vals = {state(0): 0.3, state(1): -1.2, TIME: 0.5}
    assert fn(0.5, [0.3, -1.2])[0] == pytest.approx(evaluate(e, vals))


def test_apply_folds_constants():
    assert apply("sqrt", const(Fraction(9, 4))).constant_value == Fraction(3, 2)
    assert apply("exp", const(0)).constant_value == 1


# -- round trip over random expressions ----------------------------------

_symbols = st.sampled_from([x0, x1, x2, as_expr(dstate(0)), as_expr(effort(1)), as_expr(flow(0))])
_consts = st.fractions(min_value=-5, max_value=5, max_denominator=7).map(const)


def _grow(children):
    return st.one_of(
        st.tuples(children, children).map(lambda p: p[0] + p[1]),
        st.tuples(children, children).map(lambda p: p[0] * p[1]),
        st.tuples(children, children).map(lambda p: p[0] - p[1]),
        st.tuples(children, st.integers(0, 3)).map(lambda p: p[0] ** p[1]),
        children.map(lambda c: apply("sin", c)),
    )


_exprs = st.recursive(st.one_of(_symbols, _consts), _grow, max_leaves=8)


@settings(max_examples=150, deadline=None)
@given(_exprs)
def test_print_parse_round_trip(e):
    assert parse_expr(str(e)) == e


@settings(max_examples=100, deadline=None)
@given(_exprs, _exprs)
def test_ring_laws(a, b):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) * 2 == 2 * a + 2 * b
    assert (a - a).is_zero
