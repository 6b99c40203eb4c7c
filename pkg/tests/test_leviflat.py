import pytest

from crsing.algebra import GQ, AlgebraError, parse
from crsing.crlocus import ManifoldSpec, cr_singular_locus
from crsing.leviflat import (COMPLEX, CONSISTENT, DIM, EMPTY, LEVIFLAT, NOT_A_CR_SINGULAR_IMAGE,
                             NOT_LEVIFLAT, dimension_obstruction, is_leviflat_graph, leaf_grid,
                             leaf_singular_intersection, orbit_hypersurface, push_forward_hypersurface,
                             verify_containment)
from crsing.resolution import HoloMap


def graph(rho, zs=("z1", "z2")):
    return ManifoldSpec.graph(rho, list(zs), "w")


def test_recognition():
    assert is_leviflat_graph(graph("z1*conj(z2)")).verdict == LEVIFLAT
    assert is_leviflat_graph(graph("conj(z1)*z2^2")).verdict == LEVIFLAT
    assert is_leviflat_graph(graph("z1*z2")).verdict == COMPLEX
    assert is_leviflat_graph(graph("conj(z1)*conj(z2)")).verdict == NOT_LEVIFLAT


def test_leaves_are_holomorphic_curves():
    lf = is_leviflat_graph(graph("z1*conj(z2) - conj(z2)^2/2"))
    for t in [GQ(0), GQ(1, 1), GQ(-3, 2)]:
        assert lf.leaves.is_holomorphic(t)
        leaf = lf.leaves.leaf(t)
        assert set(leaf) == {"z1", "z2", "w"}


def test_swapped_variables():
    lf = is_leviflat_graph(graph("conj(z1)*z2 - conj(z1)^2/2"))
    assert lf.leaves.leaf_var == "z2" and lf.leaves.param_var == "z1"
    S = cr_singular_locus(lf.leaves.manifold)
    assert leaf_singular_intersection(S, lf.leaves, GQ(2, 1)).verdict == DIM(0)


def test_leaf_verdicts_totally_real_example():
    M = graph("z1*conj(z2) - conj(z2)^2/2")
    lf = is_leviflat_graph(M)
    S = cr_singular_locus(M)
    for t in leaf_grid(GQ(1, -1)):
        r = leaf_singular_intersection(S, lf.leaves, t)
        assert r.verdict == DIM(0)
        s = r.certificate["sample"]
        # the leaf through t meets S = {z1 = conj z2} at z1 = conj t
        assert s["x_s"] == str(t.re) and s["y_s"] == str(-t.im)


def test_leaf_verdicts_bishop_example():
    M = graph("z2*conj(z2) + conj(z2)^2/2")
    lf = is_leviflat_graph(M)
    S = cr_singular_locus(M)
    assert leaf_singular_intersection(S, lf.leaves, GQ(0, 5)).verdict == DIM(1)
    assert leaf_singular_intersection(S, lf.leaves, GQ(1, 5)).verdict == EMPTY


def test_grid_shape():
    g = leaf_grid(GQ(0))
    assert len(g) == 25 and GQ(0) in g and GQ(-0.5, -0.5) in g


def test_obstruction():
    M = graph("(z1^2 + conj(z1)^2)/2 + (z2^2 + conj(z2)^2)/2")
    with pytest.raises(AlgebraError):
        dimension_obstruction(M)
    rep = dimension_obstruction(M, leviflat_assertion="given")
    assert rep.verdict == NOT_A_CR_SINGULAR_IMAGE
    assert dimension_obstruction(graph("z1*conj(z2)^2")).verdict == CONSISTENT


def test_push_forward_hypersurface():
    # F(z, v) = (z, v^2) maps {Im v = 0} onto {Im b = 0, Re b >= 0}; the hypervariety is Im b = 0
    F = HoloMap.from_strings(["z", "v"], ["z", "v^2"], ["a", "b"])
    h = orbit_hypersurface(["z", "v"], ["v"], [1])
    hv = push_forward_hypersurface(F, h)
    assert str(hv.polynomial) in {"b - conj(b)", "-b + conj(b)"}
    M = ManifoldSpec.general([parse("(b - conj(b))/(2*I)", hv.polynomial.ring)], ["a", "b"])
    assert verify_containment([hv.polynomial], M) == [True]
