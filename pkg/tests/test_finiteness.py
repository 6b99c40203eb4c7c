import random

import pytest
from gmpy2 import mpq
from hypothesis import given, settings, strategies as st

from crsing.algebra import GQ, INFINITE, Ring, TruncatedSeries, UnknownBeyond, parse
from crsing.finiteness import (ALL, CONFIRMED, COUNT, FAILED, LOCAL_RING, ORDER, count_roots_in_disc,
                               finiteness_test, implicit_series_solve, multiplicity, preimage_count)
from crsing.resolution import HoloMap, NormalFormData


def data(rho):
    return NormalFormData.from_strings(2, rho)


def test_finiteness_order():
    fin = finiteness_test(data("z1*conj(z1) + z1^4 + conj(z1)^4"))
    assert fin.finite and fin.order == 4
    assert not finiteness_test(data("z1*conj(z1)"))


def test_truncated_order_is_unknown():
    R = Ring.complex(["z1"])
    series = TruncatedSeries(parse("z1*conj(z1)", R), 5)
    fin = finiteness_test(series)
    assert fin.finite is None and isinstance(fin.order, UnknownBeyond)


def test_implicit_series():
    R = Ring.complex(["t", "s"], conj=False)
    sol = implicit_series_solve([parse("t - s - t^2", R)], ["t"], cap=6)
    # t = (1 - sqrt(1 - 4s))/2 = s + s^2 + 2 s^3 + 5 s^4 + 14 s^5 + ...
    assert str(sol["t"].poly) == str(parse("s + s^2 + 2*s^3 + 5*s^4 + 14*s^5 + 42*s^6", R))


def test_count_roots_certified():
    # (t - 1/100)(t + 1/50)(t - 3): two roots in |t| < 1/10
    coeffs = [GQ(mpq(3, 5000)), GQ(mpq(-297, 5000)), GQ(mpq(-299, 100)), GQ(1)]
    r = count_roots_in_disc(coeffs, GQ(mpq(1, 10)))
    assert r.status != FAILED and r.count == 2
    # a root on the circle cannot be certified
    r = count_roots_in_disc([GQ(mpq(-1, 10)), GQ(1)], GQ(mpq(1, 10)))
    assert r.status == FAILED


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(-9, 9), st.integers(-9, 9)), min_size=1, max_size=5, unique=True))
def test_count_matches_mpmath(roots):
    """Roots placed on a grid away from the circle are counted exactly."""
    rs = [GQ(mpq(a, 40), mpq(b, 40)) for a, b in roots]
    coeffs = [GQ(1)]
    for r in rs:
        nxt = [GQ(0)] * (len(coeffs) + 1)
        for k, c in enumerate(coeffs):
            nxt[k + 1] = nxt[k + 1] + c
            nxt[k] = nxt[k] - c * r
        coeffs = nxt
    R = mpq(1, 10)
    expected = sum(1 for r in rs if r.abs2() < R * R)
    res = count_roots_in_disc(coeffs, GQ(R))
    if res.status != FAILED:
        assert res.count == expected


@pytest.mark.parametrize("rho,k", [
    ("z1*conj(z1) + (z1^2 + conj(z1)^2)/2", 2),
    ("z1*conj(z1) + z1^3 + conj(z1)^3", 3),
    ("z1*conj(z1) + conj(z1)^3 + z1^2*conj(z1)^2", 3),
])
def test_preimage_count(rho, k):
    res = preimage_count(data(rho), trials=3, seed=4)
    assert res.count == k


def test_multiplicity_methods():
    v = multiplicity(data("z1*conj(z1) + z1^4 + conj(z1)^4"), method=ALL, trials=10, seed=1)
    assert (v.k_order, v.k_local_ring, v.k_count) == (4, 4, 4)
    assert v.status == CONFIRMED and v.value() == 4
    assert multiplicity(data("z1*conj(z1)"), method=LOCAL_RING).value() is INFINITE
    assert multiplicity(data("z1*conj(z1) + z1^3 + conj(z1)^3"), method=ORDER).k_order == 3


def test_multiplicity_of_explicit_map():
    F = HoloMap.from_strings(["x", "y"], ["x^2", "y^3"], ["a", "b"])
    v = multiplicity(F, method=ALL, trials=5, seed=0)
    assert v.k_local_ring == 6
    assert v.k_count == 6
    v = multiplicity(F, method=COUNT, trials=2)
    assert v.k_local_ring is None and v.k_count == 6


def test_random_targets_are_reproducible():
    a = preimage_count(data("z1*conj(z1) + z1^3 + conj(z1)^3"), seed=9)
    b = preimage_count(data("z1*conj(z1) + z1^3 + conj(z1)^3"), seed=9)
    assert a.target == b.target and a.count == b.count
    assert random.Random(9).random() == random.Random(9).random()
