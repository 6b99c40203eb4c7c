import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from crsing.algebra import (GQ, INFINITE, AlgebraError, ParseError, Polynomial, Ring, TruncatedSeries,
                            UnknownBeyond, complexify, is_real_valued, order_of_vanishing, parse,
                            restrict_diagonal, wirtinger_derivative)

R = Ring.complex(["z", "w"])


def P(s):
    return parse(s, R)


def test_gq_arithmetic():
    a, b = GQ(1, 2), GQ(mpq(1, 3), -1)
    assert a + b == GQ(mpq(4, 3), 1)
    assert a * b == GQ(mpq(1, 3) + 2, -1 + mpq(2, 3))
    assert (a / b) * b == a
    assert a.conj() == GQ(1, -2)
    assert a.abs2() == 5
    assert GQ(0, 1) ** 2 == GQ(-1)
    with pytest.raises(ZeroDivisionError):
        a / GQ(0)


def test_gq_str():
    assert str(GQ(0, 1)) == "I"
    assert str(GQ(mpq(1, 2), -3)) == "1/2-3*I"


def test_parse_roundtrip():
    p = P("(z + conj(z))^2 - I*w/3")
    assert parse(str(p), R) == p


def test_parse_re_im():
    assert P("Re(z)") == (P("z") + P("conj(z)")) / 2
    assert P("Im(z)") == (P("z") - P("conj(z)")) / GQ(0, 2)


def test_parse_errors_have_columns():
    with pytest.raises(ParseError) as e:
        P("z + + ")
    assert e.value.col is not None
    with pytest.raises(AlgebraError):
        P("q + 1")
    with pytest.raises(AlgebraError):
        P("z^(1/2)")


def test_wirtinger():
    p = P("z^2*conj(z) + I*w*conj(w)^3")
    assert wirtinger_derivative(p, "conj(z)") == P("z^2")
    assert wirtinger_derivative(p, "conj(w)") == P("3*I*w*conj(w)^2")
    assert wirtinger_derivative(P("z"), "conj(z)").is_zero()


def test_conj_and_real_parts():
    p = P("(1+2*I)*z*conj(w)")
    assert p.conj() == P("(1-2*I)*conj(z)*w")
    assert is_real_valued(p.real_part()) and is_real_valued(p.imag_part())
    assert p.real_part() + p.imag_part() * GQ(0, 1) == p


def test_evaluate_uses_conjugate_pairs():
    p = P("z*conj(z)")
    assert p.evaluate({"z": GQ(3, 4), "w": GQ(0)}) == GQ(25)


def test_subs_and_truncation():
    p = P("z^2 + z*w")
    q = p.subs({"z": P("z + w^2")}, R)
    assert q == P("(z + w^2)^2 + (z + w^2)*w")
    assert q.truncate(2) == P("z^2 + z*w")
    t = TruncatedSeries(P("z") + P("w^5"), 3)
    assert t.poly == P("z")


def test_order_of_vanishing():
    assert order_of_vanishing(P("z^3 + w^4")) == 3
    assert order_of_vanishing(P("0")) is INFINITE
    ub = order_of_vanishing(TruncatedSeries(P("z^9"), 4))
    assert isinstance(ub, UnknownBeyond) and ub.cap == 4


def test_complexify_roundtrip():
    p = P("z*conj(z) + conj(w)^2")
    q = complexify(p)
    assert "conj(z)" not in q.ring
    assert restrict_diagonal(q, R) == p


# ---------------------------------------------------------------------------
# properties

coef = st.builds(GQ, st.fractions(max_denominator=5).map(lambda f: mpq(f.numerator, f.denominator)),
                 st.integers(-3, 3))
expo = st.tuples(*[st.integers(0, 2)] * 4)
poly = st.dictionaries(expo, coef, max_size=4).map(lambda d: Polynomial(R, d))


@settings(max_examples=60, deadline=None)
@given(poly, poly, poly)
def test_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a - a == R.zero()


@settings(max_examples=60, deadline=None)
@given(poly, poly)
def test_conj_is_a_ring_involution(a, b):
    assert (a * b).conj() == a.conj() * b.conj()
    assert a.conj().conj() == a


@settings(max_examples=60, deadline=None)
@given(poly, poly)
def test_leibniz(a, b):
    for v in R.names:
        assert (a * b).diff(v) == a.diff(v) * b + a * b.diff(v)


@settings(max_examples=40, deadline=None)
@given(poly)
def test_parse_str_roundtrip(a):
    assert parse(str(a), R) == a
