import pytest
from gmpy2 import mpq

from crsing.algebra import INFINITE, AlgebraError, Ring, TruncatedSeries, UnknownBeyond, parse
from crsing.invariants import (NOT_OBSTRUCTED_UP_TO_CAP, OBSTRUCTED, NotBishop, bishop_invariant,
                               invariance_probe, m0_equivalence_obstruction, moser_invariant,
                               random_change, transform_surface, surface_rho)
import random


@pytest.mark.parametrize("rho,gamma", [
    ("z*conj(z) + (z^2 + conj(z)^2)/2", mpq(1, 2)),
    ("2*z*conj(z) + conj(z)^2", mpq(1, 2)),
    ("z*conj(z) + I*conj(z)^2 - I*z^2", mpq(1)),
    ("z*conj(z) + z^3", mpq(0)),
    ("3*z*conj(z) + 3*z^2 + 6*conj(z)^2 + z^5", mpq(2)),
])
def test_bishop_gamma(rho, gamma):
    assert bishop_invariant(rho).gamma == gamma


def test_bishop_irrational_and_infinite():
    bd = bishop_invariant("z*conj(z) + conj(z)^2 + conj(z)^2")
    assert bd.gamma == 2
    bd = bishop_invariant("z*conj(z) + (1+I)*conj(z)^2")
    assert bd.gamma is None and bd.gamma_squared == 2 and bd.gamma_str() == "sqrt(2)"
    bd = bishop_invariant("z^2 + conj(z)^2")
    assert bd.infinite and bd.gamma is INFINITE


def test_not_bishop():
    with pytest.raises(NotBishop):
        bishop_invariant("z^2 + z^3")
    with pytest.raises(NotBishop):
        bishop_invariant("z + z*conj(z)")


def test_moser():
    s, v = moser_invariant("z*conj(z) + z^4 + conj(z)^4", trials=3)
    assert s == 4 and v.agree
    with pytest.raises(AlgebraError):
        moser_invariant("z*conj(z) + z^2/2 + conj(z)^2/2")


def test_moser_truncated_series_reports_unknown():
    R = Ring.complex(["z1"])
    out = moser_invariant(TruncatedSeries(parse("z1*conj(z1)", R), 6))
    assert isinstance(out, UnknownBeyond) and out.cap == 6


def test_m0_obstruction():
    assert m0_equivalence_obstruction("z*conj(z)") == NOT_OBSTRUCTED_UP_TO_CAP
    assert m0_equivalence_obstruction("z*conj(z) + conj(z)^7") == OBSTRUCTED
    assert m0_equivalence_obstruction("z*conj(z) + conj(z)^7", degree_cap=6) == NOT_OBSTRUCTED_UP_TO_CAP


def test_transform_keeps_graph_shape():
    rho = surface_rho("z*conj(z) + z^3 + conj(z)^3")
    change = random_change(random.Random(3))
    new = transform_surface(rho, change, 8)
    assert new.constant_term().is_zero() and new.homogeneous_part(1).is_zero()
    assert new.degree() <= 8


def test_probe_small():
    rep = invariance_probe("z*conj(z) + z^3 + conj(z)^3", seed=1, trials=3)
    assert rep.base_mult == 3 and rep.base_flag is False
    assert rep.stable
