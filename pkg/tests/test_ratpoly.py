import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from glueform.errors import ParseError, UsageError
from glueform.ratpoly import (
    Polynomial,
    PolyMap,
    VarContext,
    monomials_up_to,
    parse_poly,
    poly_add,
    poly_compose,
    poly_eval,
    poly_mul,
    poly_partial,
)

from oracles import ctx_n, rand_point, rand_poly, to_sympy

XY = VarContext.of("x y")
ST = VarContext.of("s t")
S = VarContext.of("s")


def P(text, ctx=XY):
    return parse_poly(text, ctx)


# -- rationals and contexts ------------------------------------------------

def test_coefficients_are_canonical_fractions():
    p = Polynomial(XY, {(1, 0): Fraction(4, 6), (0, 0): Fraction(0, 5)})
    assert p.terms == {(1, 0): Fraction(2, 3)}
    c = p.coefficient((1, 0))
    assert c.denominator > 0 and c.numerator == 2 and c.denominator == 3


def test_varcontext_rejects_duplicates_and_bad_names():
    with pytest.raises(UsageError):
        VarContext.of("x x")
    with pytest.raises(UsageError):
        VarContext(("1x",))
    assert VarContext.of("a_1 B") .names == ("a_1", "B")


# -- poly_add / poly_mul ---------------------------------------------------

def test_add_examples():
    assert poly_add(P("x+y"), P("x-y")) == P("2*x")
    p = P("3*x^2 - y")
    assert poly_add(p, Polynomial.zero(XY)) == p
    z = poly_add(P("x^2"), P("-x^2"))
    assert z.is_zero() and z.terms == {}


def test_mul_examples():
    assert poly_mul(P("x+y"), P("x-y")) == P("x^2 - y^2")
    p = P("1/2*x*y + 3")
    assert poly_mul(p, Polynomial.constant(XY, 1)) == p
    assert poly_mul(p, Polynomial.zero(XY)).is_zero()


def test_degree_laws():
    rng = random.Random(3)
    for _ in range(50):
        a, b = rand_poly(rng, XY, 5), rand_poly(rng, XY, 5)
        assert (a + b).degree() <= max(a.degree(), b.degree())
        if a and b:
            assert (a * b).degree() == a.degree() + b.degree()


def test_context_mismatch_is_usage_error():
    with pytest.raises(UsageError):
        poly_add(P("x"), parse_poly("s", ST))
    with pytest.raises(UsageError):
        poly_mul(P("x"), parse_poly("s", ST))


def test_ring_axioms_500_random_cases():
    rng = random.Random(20240501)
    for case in range(500):
        ctx = ctx_n(rng.randint(1, 4))
        a, b, c = (rand_poly(rng, ctx, 6, 4) for _ in range(3))
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a + b == b + a
        assert a * b == b * a
        assert a * (b + c) == a * b + a * c


def test_grlex_order_of_terms():
    p = P("y^2 + 1 + x*y + x^3 + x^2")
    assert list(p.terms) == [(3, 0), (2, 0), (1, 1), (0, 2), (0, 0)]
    assert str(p) == "x^3 + x^2 + x*y + y^2 + 1"


def test_monomials_up_to_order_and_count():
    monos = monomials_up_to(2, 2)
    assert monos == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert len(monomials_up_to(3, 4)) == 35


# -- poly_compose ----------------------------------------------------------

def test_compose_cross_equation_vanishes():
    alpha = PolyMap.parse(S, ["s", "0"])
    assert poly_compose(P("x*y"), alpha).is_zero()


def test_compose_identity():
    assert poly_compose(P("x"), PolyMap.identity(XY)) == P("x")


def test_compose_example_checked_at_random_points():
    p = P("x^2 + y")
    f = PolyMap.parse(ST, ["s+t", "s*t"])
    got = poly_compose(p, f)
    assert got == parse_poly("s^2 + 2*s*t + t^2 + s*t", ST)
    rng = random.Random(7)
    for _ in range(20):
        pt = rand_point(rng, 2)
        s, t = pt
        assert poly_eval(got, pt) == (s + t) ** 2 + s * t


def test_compose_arity_mismatch():
    with pytest.raises(UsageError):
        poly_compose(P("x*y"), PolyMap.parse(S, ["s"]))


def test_compose_is_ring_morphism():
    rng = random.Random(11)
    for _ in range(100):
        p, q = rand_poly(rng, XY, 4), rand_poly(rng, XY, 4)
        f = PolyMap(ST, (rand_poly(rng, ST, 2), rand_poly(rng, ST, 2)))
        assert poly_compose(p + q, f) == poly_compose(p, f) + poly_compose(q, f)
        assert poly_compose(p * q, f) == poly_compose(p, f) * poly_compose(q, f)


def test_compose_agrees_with_sympy():
    rng = random.Random(12)
    xs = sympy.symbols("x y")
    for _ in range(30):
        p = rand_poly(rng, XY, 4)
        f = PolyMap(ST, (rand_poly(rng, ST, 3), rand_poly(rng, ST, 3)))
        expected = sympy.expand(to_sympy(p).subs({xs[0]: to_sympy(f.components[0]),
                                                  xs[1]: to_sympy(f.components[1])},
                                                 simultaneous=True))
        assert sympy.expand(to_sympy(poly_compose(p, f)) - expected) == 0


# -- poly_partial ----------------------------------------------------------

def test_partial_examples():
    assert poly_partial(P("x^2*y"), 0) == P("2*x*y")
    assert poly_partial(P("x^2"), 1).is_zero()
    assert poly_partial(P("3/2*x^2*y - 1"), 0) == P("3*x*y")


def test_partial_matches_exact_central_difference():
    # p is quadratic in x, so the central secant is exact
    p = P("3/2*x^2*y - 1")
    dp = poly_partial(p, 0)
    rng = random.Random(5)
    for _ in range(20):
        x, y = rand_point(rng, 2)
        h = Fraction(rng.randint(1, 9), rng.randint(1, 9))
        secant = (poly_eval(p, (x + h, y)) - poly_eval(p, (x - h, y))) / (2 * h)
        assert poly_eval(dp, (x, y)) == secant


def test_partial_index_out_of_range():
    with pytest.raises(UsageError):
        poly_partial(P("x"), 2)
    with pytest.raises(UsageError):
        poly_partial(P("x"), -1)


def test_chain_rule():
    rng = random.Random(21)
    for _ in range(60):
        p = rand_poly(rng, XY, 4)
        f = PolyMap(ST, (rand_poly(rng, ST, 3), rand_poly(rng, ST, 3)))
        for j in range(2):
            lhs = poly_partial(poly_compose(p, f), j)
            rhs = Polynomial.zero(ST)
            for i in range(2):
                rhs = rhs + poly_compose(poly_partial(p, i), f) * poly_partial(f.components[i], j)
            assert lhs == rhs


# -- poly_eval -------------------------------------------------------------

def test_eval_examples():
    assert poly_eval(P("x*y"), (2, 3)) == 6
    assert poly_eval(P("5"), (Fraction(1, 7), -4)) == 5
    assert poly_eval(P("x^2 - y^2"), (Fraction(3, 2), Fraction(1, 2))) == 2


def test_eval_length_mismatch():
    with pytest.raises(UsageError):
        poly_eval(P("x"), (1,))


def test_eval_is_homomorphism():
    rng = random.Random(8)
    for _ in range(100):
        ctx = ctx_n(3)
        p, q = rand_poly(rng, ctx, 5), rand_poly(rng, ctx, 5)
        pt = rand_point(rng, 3)
        assert poly_eval(p * q, pt) == poly_eval(p, pt) * poly_eval(q, pt)
        assert poly_eval(p + q, pt) == poly_eval(p, pt) + poly_eval(q, pt)


# -- parser ----------------------------------------------------------------

def test_parse_examples():
    assert P("3/2*x^2*y - 1").terms == {(2, 1): Fraction(3, 2), (0, 0): Fraction(-1)}
    assert P("0").is_zero()
    assert P("(x+y)^2") == P("x^2 + 2*x*y + y^2")


@pytest.mark.parametrize("text, expected", [
    ("-x^2", "-x^2"),
    ("x - -y", "x + y"),
    ("  x*  y ", "x*y"),
    ("2^3*x", "8*x"),
    ("3/2^2", "9/4"),
    ("-(x - y)", "-x + y"),
    ("((x))", "x"),
    ("x^0", "1"),
])
def test_parse_accepts(text, expected):
    assert str(P(text)) == expected


@pytest.mark.parametrize("text, fragment, pos", [
    ("2x", "implicit multiplication", 1),
    ("x y", "implicit multiplication", 2),
    ("x(y)", "implicit multiplication", 1),
    ("z + 1", "unknown variable", 0),
    ("x^-2", "negative exponent", 2),
    ("x^1.5", "non-integer exponent", 3),
    ("x^1/2", "non-integer exponent", 3),
    ("x/2", "unexpected '/'", 1),
    ("1/0", "zero denominator", 2),
    ("(x + y", "expected ')'", 6),
    ("x +", "unexpected end", 3),
    ("", "empty expression", 0),
    ("x $ y", "unexpected character", 2),
    ("x^y", "non-negative integer", 2),
    ("+x", "unexpected '+'", 0),
])
def test_parse_errors_carry_position(text, fragment, pos):
    with pytest.raises(ParseError) as info:
        P(text)
    assert fragment in info.value.message
    assert info.value.pos == pos


coefficients = st.fractions(min_value=-50, max_value=50, max_denominator=12)


@st.composite
def polynomials(draw, ctx=XY, max_exp=4):
    n = len(ctx)
    terms = draw(st.dictionaries(st.tuples(*[st.integers(0, max_exp)] * n), coefficients, max_size=6))
    return Polynomial(ctx, terms)


@given(polynomials())
@settings(max_examples=200, deadline=None)
def test_parse_print_round_trip(p):
    assert parse_poly(str(p), XY) == p


@given(polynomials(VarContext.of("a b c"), 3), polynomials(VarContext.of("a b c"), 3))
@settings(max_examples=100, deadline=None)
def test_arithmetic_matches_sympy(p, q):
    assert sympy.expand(to_sympy(p * q) - to_sympy(p) * to_sympy(q)) == 0
    assert sympy.expand(to_sympy(p - q) - (to_sympy(p) - to_sympy(q))) == 0


def test_zero_variable_context():
    pt = VarContext(())
    c = parse_poly("3/4 - 1/4", pt)
    assert c == Fraction(1, 2) and str(c) == "1/2"
    assert poly_eval(c, ()) == Fraction(1, 2)


def test_polymap_compose_and_identity():
    f = PolyMap.parse(ST, ["s+t", "s*t"])
    g = PolyMap.parse(S, ["s", "2*s"])
    fg = f.compose(g)
    assert fg.components == (parse_poly("3*s", S), parse_poly("2*s^2", S))
    assert f.compose(PolyMap.identity(ST)) == f
    with pytest.raises(UsageError):
        g.compose(f)
