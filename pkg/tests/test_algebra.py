"""Core polynomial arithmetic, orders and the text syntax."""

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from connobs.algebra import (
    ExponentOverflow,
    MonomialOrder,
    Polynomial,
    PolyRing,
    apply_derivation,
    mono_mul,
    partial_derivative,
    poly_add,
    poly_mul,
)
from connobs.polyparse import ParseError, parse_polynomial


R2 = PolyRing(["x", "y"])
R3 = PolyRing(["x", "y", "z"])


def P(text, ring=R2):
    return ring.from_string(text)


class TestArithmetic:
    def test_add_cancellation(self):
        assert P("x+y") + P("-x") == P("y")

    def test_add_identity(self):
        f = P("x^2-3*y+1")
        assert R2.zero() + f == f

    def test_add_half_coefficients(self):
        # (x^2 + 1/2 y) + (1/2 y) = x^2 + y, by hand
        assert P("x^2+1/2*y") + P("1/2*y") == P("x^2+y")

    def test_mul_difference_of_squares(self):
        assert P("x+y") * P("x-y") == P("x^2-y^2")

    def test_mul_identity_and_zero(self):
        f = P("x^3-2*x*y+7")
        assert f * R2.one() == f
        assert (f * R2.zero()).is_zero

    def test_ring_mismatch(self):
        with pytest.raises(ValueError):
            poly_add(P("x"), P("x", R3))
        with pytest.raises(ValueError):
            poly_mul(P("x"), P("z", R3))

    def test_exponent_overflow_guard(self):
        with pytest.raises(ExponentOverflow):
            mono_mul((1 << 15, 0), (1 << 15, 0))


class TestDerivatives:
    def test_power_rule(self):
        f = P("x^3+y^3+z^3", R3)
        assert partial_derivative(f, 0) == P("3*x^2", R3)

    def test_mixed(self):
        f = P("x^2*y+y^3")
        assert partial_derivative(f, 1) == P("x^2+3*y^2")

    def test_constant_in_variable(self):
        f = P("x^2+y^5", R3)
        assert partial_derivative(f, 2).is_zero

    def test_index_range(self):
        with pytest.raises(IndexError):
            partial_derivative(P("x"), 5)


class TestApplyDerivation:
    def test_monomial_curve_relation(self):
        # (3x, 4y, 5z) applied to xz - y^2 gives 8xz - 8y^2 = 8*(xz - y^2)
        coeffs = [P("3*x", R3), P("4*y", R3), P("5*z", R3)]
        out = apply_derivation(coeffs, P("x*z-y^2", R3))
        assert out == P("8*x*z-8*y^2", R3)
        assert out == P("x*z-y^2", R3) * 8

    def test_zero_derivation(self):
        coeffs = [R3.zero()] * 3
        assert apply_derivation(coeffs, P("x*y*z+x^4", R3)).is_zero

    def test_unit_direction(self):
        out = apply_derivation([R2.one(), R2.zero()], P("x^2+y^2"))
        assert out == P("2*x")

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            apply_derivation([R2.one()], P("x"))


# -- randomized algebra laws -------------------------------------------------

coeffs_st = st.integers(min_value=-9, max_value=9)
exps_st = st.tuples(st.integers(0, 4), st.integers(0, 4), st.integers(0, 2))


@st.composite
def polys(draw, ring=R3, max_terms=5):
    terms = draw(st.lists(st.tuples(exps_st, coeffs_st), max_size=max_terms))
    acc = {}
    for mono, c in terms:
        acc[mono] = acc.get(mono, 0) + c
    return ring.from_dict({m: mpq(c) for m, c in acc.items() if c})


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), polys())
def test_ring_axioms(f, g, h):
    assert (f + g) + h == f + (g + h)
    assert f + g == g + f
    assert f * g == g * f
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h


@settings(max_examples=60, deadline=None)
@given(polys(), polys())
def test_leibniz_product_rule(f, g):
    for i in range(3):
        lhs = (f * g).partial_derivative(i)
        rhs = f * g.partial_derivative(i) + g * f.partial_derivative(i)
        assert lhs == rhs


@settings(max_examples=60, deadline=None)
@given(polys(), polys(), polys(), polys())
def test_apply_derivation_linearity(f, g, a, b):
    # k-linear in the argument
    coeffs = [a, b, a * b]
    lhs = apply_derivation(coeffs, f + g)
    assert lhs == apply_derivation(coeffs, f) + apply_derivation(coeffs, g)
    # A-linear in the coefficient vector
    scaled = [a * c for c in coeffs]
    assert apply_derivation(scaled, f) == a * apply_derivation(coeffs, f)


monos_st = st.tuples(st.integers(0, 6), st.integers(0, 6), st.integers(0, 6))
ORDERS = [
    MonomialOrder.lex(),
    MonomialOrder.degrevlex(),
    MonomialOrder.weighted_degrevlex([3, 4, 5]),
]


@settings(max_examples=120, deadline=None)
@given(monos_st, monos_st, monos_st)
def test_order_axioms(a, b, c):
    for order in ORDERS:
        ka, kb = order.key(a), order.key(b)
        # totality with equality only on equal monomials
        assert (ka == kb) == (a == b)
        # multiplicativity
        if ka > kb:
            assert order.key(mono_mul(a, c)) > order.key(mono_mul(b, c))
        # 1 is minimal
        one = (0, 0, 0)
        if a != one:
            assert order.key(a) > order.key(one)


# -- text round trip ----------------------------------------------------------


class TestTextSyntax:
    @pytest.mark.parametrize("text", [
        "x^3+y^3+z^3",
        "3*x*z-2y^2",
        "1/2*x-3/4",
        "-x+1",
        "x*(y+z)^2",
        "2 x y",
    ])
    def test_parse_known_strings(self, text):
        assert not parse_polynomial(text, R3).is_zero

    def test_optional_star(self):
        assert P("2y^2") == P("2*y^2")
        assert P("3x*y") == P("3*x*y")

    def test_rational_coefficients(self):
        f = P("1/2*x+2/4*x")
        assert f == P("x")

    @settings(max_examples=80, deadline=None)
    @given(polys())
    def test_round_trip(self, f):
        assert parse_polynomial(str(f), R3) == f

    def test_round_trip_lex_ring(self):
        ring = PolyRing(["x", "y"], MonomialOrder.lex())
        f = ring.from_string("x^2-y+1/3")
        assert ring.from_string(str(f)) == f

    def test_unknown_variable(self):
        with pytest.raises(ParseError) as err:
            parse_polynomial("x+q", R2)
        assert err.value.line == 1
        assert err.value.column == 3

    def test_zero_denominator(self):
        with pytest.raises(ParseError):
            parse_polynomial("1/0", R2)

    def test_trailing_garbage(self):
        with pytest.raises(ParseError):
            parse_polynomial("x+y)", R2)
