import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from glueform.errors import ParseError, UsageError
from glueform.exterior import (
    DifferentialForm,
    ext_derivative,
    form_basis_labels,
    form_coordinates,
    form_from_coordinates,
    format_form_file,
    parse_form,
    pullback_form,
    wedge,
)
from glueform.ratpoly import Polynomial, PolyMap, VarContext, parse_poly

from oracles import ctx_n, eval_alternating, pullback_eval, rand_form, rand_map, rand_point

XY = VarContext.of("x y")
UV = VarContext.of("u v")
S = VarContext.of("s")


def form(ctx, entries):
    """entries: {"x y": "poly", ...}"""
    terms = {}
    for frame, text in entries.items():
        idx = tuple(ctx.index(n) for n in frame.split())
        terms[idx] = parse_poly(text, ctx)
    degree = len(next(iter(entries)).split()) if entries else 0
    return DifferentialForm(ctx, degree, terms)


dx = DifferentialForm.coordinate(XY, "x")
dy = DifferentialForm.coordinate(XY, "y")


# -- construction ----------------------------------------------------------

def test_canonical_construction():
    w = DifferentialForm(XY, 1, {(0,): parse_poly("x - x", XY), (1,): parse_poly("2", XY)})
    assert w.terms == {(1,): parse_poly("2", XY)}
    with pytest.raises(UsageError):
        DifferentialForm(XY, 2, {(1, 0): parse_poly("1", XY)})
    with pytest.raises(UsageError):
        DifferentialForm(XY, 1, {(2,): parse_poly("1", XY)})
    assert DifferentialForm(XY, 3).is_zero()


# -- wedge -----------------------------------------------------------------

def test_wedge_examples():
    assert wedge(dx, dx).is_zero()
    a = form(XY, {"y": "x"})
    b = form(XY, {"x": "y"})
    assert wedge(a, b) == form(XY, {"x y": "-x*y"})
    f = DifferentialForm.function(parse_poly("x + 1", XY))
    w = form(XY, {"x": "y", "y": "x^2"})
    assert wedge(f, w) == w * parse_poly("x + 1", XY)


def test_wedge_example_by_alternating_evaluation():
    a = form(XY, {"y": "x"})
    b = form(XY, {"x": "y"})
    ab = wedge(a, b)
    rng = random.Random(4)
    for _ in range(20):
        p = rand_point(rng, 2)
        v1, v2 = rand_point(rng, 2), rand_point(rng, 2)
        # (a^b)(v1, v2) = a(v1) b(v2) - a(v2) b(v1)
        expected = (eval_alternating(a, p, [v1]) * eval_alternating(b, p, [v2])
                    - eval_alternating(a, p, [v2]) * eval_alternating(b, p, [v1]))
        assert eval_alternating(ab, p, [v1, v2]) == expected


def test_wedge_context_mismatch():
    with pytest.raises(UsageError):
        wedge(dx, DifferentialForm.coordinate(S, 0))


# -- exterior derivative ---------------------------------------------------

def test_derivative_examples():
    assert ext_derivative(form(XY, {"y": "x"})) == wedge(dx, dy)
    assert ext_derivative(DifferentialForm.function(parse_poly("7/3", XY))).is_zero()
    assert ext_derivative(DifferentialForm.function(parse_poly("x^2*y", XY))) == form(XY, {"x": "2*x*y", "y": "x^2"})


def test_dd_zero_random():
    rng = random.Random(100)
    for _ in range(100):
        ctx = ctx_n(rng.randint(1, 3))
        w = rand_form(rng, ctx, rng.randint(0, 3), 5)
        assert ext_derivative(ext_derivative(w)).is_zero()


# -- pullback --------------------------------------------------------------

def test_pullback_examples():
    alpha = PolyMap.parse(S, ["s", "0"])
    assert pullback_form(alpha, dy).is_zero()
    assert pullback_form(alpha, dx) == DifferentialForm.coordinate(S, "s")
    w = form(XY, {"x": "y", "y": "x^2 - 1"})
    assert pullback_form(PolyMap.identity(XY), w) == w
    f = PolyMap.parse(UV, ["u^2 + v", "u*v"])
    assert pullback_form(f, wedge(dx, dy)) == form(UV, {"u v": "2*u^2 - v"})


def test_pullback_example_by_tangent_vectors():
    f = PolyMap.parse(UV, ["u^2 + v", "u*v"])
    w = wedge(dx, dy)
    got = pullback_form(f, w)
    rng = random.Random(6)
    for _ in range(20):
        p = rand_point(rng, 2)
        vs = [rand_point(rng, 2), rand_point(rng, 2)]
        assert eval_alternating(got, p, vs) == pullback_eval(f, w, p, vs)


def test_pullback_random_against_tangent_vectors():
    rng = random.Random(61)
    for _ in range(40):
        src, tgt = ctx_n(rng.randint(1, 3), "u"), ctx_n(rng.randint(1, 3))
        f = rand_map(rng, src, len(tgt))
        k = rng.randint(0, min(len(src), len(tgt)))
        w = rand_form(rng, tgt, k, 3)
        got = pullback_form(f, w)
        p = rand_point(rng, len(src))
        vs = [rand_point(rng, len(src)) for _ in range(k)]
        assert eval_alternating(got, p, vs) == pullback_eval(f, w, p, vs)


def test_pullback_arity_mismatch():
    with pytest.raises(UsageError):
        pullback_form(PolyMap.parse(S, ["s"]), dx)


def test_pullback_degree_above_source_dimension_is_zero():
    f = PolyMap.parse(S, ["s", "s^2"])
    assert pullback_form(f, wedge(dx, dy)) == DifferentialForm.zero(S, 2)


# -- properties (hypothesis) -----------------------------------------------

@st.composite
def forms_and_maps(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    rng = random.Random(seed)
    n = draw(st.integers(1, 3))
    m = draw(st.integers(1, 3))
    tgt, src = ctx_n(n), ctx_n(m, "u")
    ka, kb = draw(st.integers(0, n)), draw(st.integers(0, n))
    return (rand_form(rng, tgt, ka, 4), rand_form(rng, tgt, kb, 4), rand_map(rng, src, n),
            rand_map(rng, ctx_n(draw(st.integers(1, 3)), "w"), m))


@given(forms_and_maps())
@settings(max_examples=60, deadline=None)
def test_cartan_identities(data):
    a, b, f, g = data
    assert ext_derivative(ext_derivative(a)).is_zero()
    assert wedge(a, b) == wedge(b, a) * ((-1) ** (a.degree * b.degree))
    assert ext_derivative(wedge(a, b)) == (wedge(ext_derivative(a), b)
                                           + wedge(a, ext_derivative(b)) * ((-1) ** a.degree))
    assert pullback_form(f, ext_derivative(a)) == ext_derivative(pullback_form(f, a))
    assert pullback_form(f, wedge(a, b)) == wedge(pullback_form(f, a), pullback_form(f, b))
    assert pullback_form(g, pullback_form(f, a)) == pullback_form(f.compose(g), a)


# -- coordinates and text syntax --------------------------------------------

def test_coordinates_round_trip():
    rng = random.Random(3)
    ctx = ctx_n(2)
    labels = form_basis_labels(2, 1, 4)
    assert len(labels) == 2 * 15
    for _ in range(20):
        w = rand_form(rng, ctx, 1, 4)
        coords = form_coordinates(w)
        vec = [coords.get(lab, Fraction(0)) for lab in labels]
        assert form_from_coordinates(ctx, 1, labels, vec) == w


def test_parse_form_file():
    text = '# comment\ncoeff = "x*y" frame = x\ncoeff = "1" frame = x\ncoeff = "2" frame = y\n'
    assert parse_form(text, XY) == form(XY, {"x": "x*y + 1", "y": "2"})
    assert parse_form('coeff = "s^2" frame =\n', S) == DifferentialForm.function(parse_poly("s^2", S))
    assert parse_form('coeff = "s^2"\n', S).degree == 0
    zero1 = parse_form('coeff = "0" frame = t\n', VarContext.of("t"))
    assert zero1.is_zero() and zero1.degree == 1


@pytest.mark.parametrize("text, fragment", [
    ('coeff = "1" frame = y x\n', "not strictly increasing"),
    ('coeff = "1" frame = x x\n', "not strictly increasing"),
    ('coeff = "1" frame = z\n', "not in"),
    ('coeff = "1" frame = x\ncoeff = "1" frame = x y\n', "degree 1"),
    ('coeff = "2x" frame = x\n', "implicit multiplication"),
    ('coef = "1"\n', "expected"),
    ('# nothing\n', "no entries"),
])
def test_parse_form_errors(text, fragment):
    with pytest.raises(ParseError) as info:
        parse_form(text, XY)
    assert fragment in str(info.value)


def test_form_file_round_trip():
    rng = random.Random(8)
    for k in range(3):
        for _ in range(10):
            w = rand_form(rng, XY, k, 3)
            if w.is_zero() and k == 0:
                continue
            assert parse_form(format_form_file(w), XY) == w
