"""Acceptance gate: one test per acceptance check.

Expected values are written out here by hand and checked against the
package; where a second computation is cheap it is done with sympy so the
oracle does not share code with the implementation.
"""

import random

import pytest
import sympy

from crsing.algebra import GQ, INFINITE, parse
from crsing.crlocus import (ManifoldSpec, cr_singular_locus, general_locus_equations,
                            graph_locus_equations, same_real_locus)
from crsing.finiteness import (ALL, CONFIRMED, _as_data, codim2_membership_witness, finiteness_test,
                               multiplicity)
from crsing.ideals import groebner_basis, ideal_membership, local_multiplicity
from crsing.invariants import invariance_probe
from crsing.leviflat import (CONSISTENT, DIM, EMPTY, NOT_A_CR_SINGULAR_IMAGE, dimension_obstruction,
                             is_leviflat_graph, leaf_grid, leaf_singular_intersection,
                             nearby_leaves_meet)
from crsing.manifest import parse_manifest
from crsing.resolution import (build_resolution_map, nonextendable_candidate, pullback_singular_locus,
                               verify_parametrization)
from crsing.fixtures import DOUBLE_COVER_MANIFEST

# ---------------------------------------------------------------------------
# oracles

LEVIFLAT_EXAMPLES = {
    # rho: expected S, as equations before intersecting with M
    "z2*conj(z2) + conj(z2)^2/2": ["z2 + conj(z2)"],
    "z1*conj(z2)^2": ["z1*z2", "z1*conj(z2)", "conj(z1)*z2", "conj(z1)*conj(z2)"],
    "z1*conj(z2) - conj(z2)^2/2": ["z1 - conj(z2)"],
    "z1*conj(z2) - z2*conj(z2)^2/2": ["z1 - z2*conj(z2)"],
}


def not_an_image(n):
    zs = [f"z{k}" for k in range(1, n)]
    rho = " + ".join(f"({z}^2 + conj({z})^2)/2" for z in zs)
    return ManifoldSpec.graph(rho, zs, "w"), [*zs, "w"]


BISHOP = {"1/2": "z*conj(z) + (z^2 + conj(z)^2)/2",
          "1": "z*conj(z) + (z^2 + conj(z)^2)",
          "2": "z*conj(z) + 2*(z^2 + conj(z)^2)"}
MOSER = {s: f"z*conj(z) + z^{s} + conj(z)^{s}" for s in (3, 4, 5)}
M0 = "z*conj(z)"


def surface(rho):
    return ManifoldSpec.graph(rho, ["z"], "w")


def double_cover():
    return parse_manifest(DOUBLE_COVER_MANIFEST, "double-cover")


def expected_ideal(M, eqs):
    given = [parse(e, M.ring) for e in eqs]
    return given + [g.conj() for g in given] + M.complex_equations()


def sympy_reduced_basis(polys):
    """Reduced grevlex basis computed by sympy, as a set of expressions."""
    ring = polys[0].ring
    syms = sympy.symbols(f"v0:{len(ring.variables)}")
    exprs = []
    for p in polys:
        e = 0
        for mon, c in p.terms.items():
            coef = sympy.Rational(int(c.re.numerator), int(c.re.denominator)) + \
                sympy.I * sympy.Rational(int(c.im.numerator), int(c.im.denominator))
            e += coef * sympy.Mul(*[s ** k for s, k in zip(syms, mon)])
        exprs.append(e)
    G = sympy.groebner(exprs, *syms, order="grevlex", extension=sympy.I)
    return {sympy.expand(g) for g in G.exprs}


def resolutions():
    """Every fixture with a resolution map, as (name, F, N, M)."""
    out = []
    for rho in LEVIFLAT_EXAMPLES:
        M = ManifoldSpec.graph(rho, ["z1", "z2"], "w")
        F, N = is_leviflat_graph(M).chart
        out.append((rho, F, N, M))
    man = double_cover()
    out.append(("double-cover", man.map, man.source, man.manifold))
    for name, rho in [("m0", M0), *BISHOP.items(), *((str(s), r) for s, r in MOSER.items())]:
        data = _as_data(surface(rho))
        F, N = build_resolution_map(data)
        out.append((name, F, N, data.manifold()))
    return out


# ---------------------------------------------------------------------------


def test_singular_locus_exact():
    cases = [(ManifoldSpec.graph(rho, ["z1", "z2"], "w"), S) for rho, S in LEVIFLAT_EXAMPLES.items()]
    cases += [not_an_image(3), not_an_image(4)]
    for M, S in cases:
        L = cr_singular_locus(M)
        ours = L.real_ideal_generators()
        theirs = expected_ideal(M, S)
        cmp = same_real_locus(ours, theirs, exact=True)
        assert cmp["equal"], (M.rho, cmp)
        assert sympy_reduced_basis(ours) == sympy_reduced_basis(theirs), M.rho


# ---------------------------------------------------------------------------


def _random_graph(rng):
    m = rng.choice([1, 2])
    zs = [f"z{k}" for k in range(1, m + 1)]
    vars_ = zs + [f"conj({z})" for z in zs]
    terms = []
    for _ in range(rng.randint(2, 4)):
        deg = rng.randint(2, 4)
        mon = "*".join(rng.choice(vars_) for _ in range(deg))
        c = f"({rng.randint(-3, 3) or 1} + {rng.randint(-2, 2)}*I)"
        terms.append(f"{c}*{mon}")
    rho = " + ".join(terms)
    g = ManifoldSpec.graph(rho, zs, "w")
    q = g.graph_equation()
    gen = ManifoldSpec.general([q.real_part(), q.imag_part()], zs + ["w"])
    return g, gen


def test_graph_and_general_loci_agree():
    rng = random.Random(2024)
    for _ in range(10):
        g, gen = _random_graph(rng)
        a = graph_locus_equations(g) + g.complex_equations()
        b = general_locus_equations(gen) + gen.complex_equations()
        ga, gb = groebner_basis(a), groebner_basis(b)
        assert all(ideal_membership(p, gb, is_basis=True) for p in a), g.rho
        assert all(ideal_membership(p, ga, is_basis=True) for p in b), g.rho


# ---------------------------------------------------------------------------


@pytest.mark.parametrize("rho,expected", [(r, 2) for r in BISHOP.values()] +
                         [(r, s) for s, r in MOSER.items()])
def test_multiplicity_methods_agree(rho, expected):
    v = multiplicity(surface(rho), method=ALL, seed=7, trials=100)
    assert v.k_order == expected
    assert v.k_local_ring == expected
    assert v.k_count == expected
    assert v.agree and v.status == CONFIRMED
    assert v.count_trials == 100
    assert v.count_success_rate >= 0.95


# ---------------------------------------------------------------------------


def test_m0_not_finite():
    data = _as_data(surface(M0))
    fin = finiteness_test(data)
    assert fin.finite is False
    F, _ = build_resolution_map(data)
    assert local_multiplicity(F.components) is INFINITE
    assert codim2_membership_witness(F)


# ---------------------------------------------------------------------------


def test_jacobian_zero_set_is_the_pullback_of_s():
    for name, F, N, M in resolutions():
        rep = pullback_singular_locus(F, N, M, seed=5, count=20)
        assert len(rep.regular_samples) == 20, name
        assert rep.singular_samples, name
        assert rep.ok, (name, rep.failures)


# ---------------------------------------------------------------------------


@pytest.mark.parametrize("rho", [M0, *BISHOP.values(), *MOSER.values()])
def test_invariance_probes(rho):
    rep = invariance_probe(surface(rho), seed=11, trials=20)
    assert len(rep.trials) == 20
    for t in rep.trials:
        assert t.flag == rep.base_flag
        assert t.mult == rep.base_mult
    assert rep.stable


# ---------------------------------------------------------------------------


def test_leaf_intersections():
    allowed = {EMPTY, DIM(0), DIM(1)}
    params = [GQ(0), GQ(1), GQ(0, 1), GQ(-2, 1), GQ(1, 3)] + leaf_grid(GQ(1, 1))
    for rho in LEVIFLAT_EXAMPLES:
        M = ManifoldSpec.graph(rho, ["z1", "z2"], "w")
        lf = is_leviflat_graph(M)
        assert lf, rho
        S = cr_singular_locus(M)
        assert lf.leaves.j == 1
        centers = []
        for t in params:
            r = leaf_singular_intersection(S, lf.leaves, t)
            assert r.verdict in allowed, (rho, t, r.verdict)
            if r.verdict == DIM(lf.leaves.j - 1):
                centers.append(t)
        # only {Re z2 = 0} has no leaf meeting S in isolated points
        assert bool(centers) == (rho != "z2*conj(z2) + conj(z2)^2/2"), rho
        for c in centers[:2]:
            assert nearby_leaves_meet(S, lf.leaves, c).all_meet, (rho, c)


# ---------------------------------------------------------------------------


def test_dimension_obstruction():
    for n in (3, 4):
        M, _ = not_an_image(n)
        rep = dimension_obstruction(M, leviflat_assertion="Im w = 0 and Re w = Re(sum z_k^2)")
        assert rep.dim_s == 0 and rep.bound == 2 * (n - 2)
        assert rep.verdict == NOT_A_CR_SINGULAR_IMAGE
    for rho in LEVIFLAT_EXAMPLES:
        rep = dimension_obstruction(ManifoldSpec.graph(rho, ["z1", "z2"], "w"))
        assert rep.verdict == CONSISTENT, rho


# ---------------------------------------------------------------------------


def test_double_cover_end_to_end():
    man = double_cover()
    F, N, M = man.map, man.source, man.manifold
    assert verify_parametrization(F, N, M)

    # independent substitution with sympy
    a, b, s1, s2 = sympy.symbols("a b s1 s2", real=True)
    z = a + sympy.I * b
    w1 = s1 + sympy.I * (a**2 + b**2) / 2
    w2 = s2 + sympy.I * (a**2 + b**2) ** 2 / 2
    z1, z2, w = z, w1 + sympy.I * w2, (w1 - sympy.I * w2) ** 2
    rho = (sympy.conjugate(z2) + sympy.I * z1 * sympy.conjugate(z1) + (z1 * sympy.conjugate(z1)) ** 2) ** 2
    assert sympy.simplify(sympy.expand(w - rho)) == 0

    W1, W2 = sympy.symbols("w1 w2")
    jac = sympy.Matrix([[1, 0, 0], [0, 1, sympy.I], [0, 2 * (W1 - sympy.I * W2), -2 * sympy.I * (W1 - sympy.I * W2)]])
    assert str(F.jacobian()) == "-4*I*w1 - 4*w2"
    assert sympy.expand(jac.det() - (-4 * sympy.I * (W1 - sympy.I * W2))) == 0
    assert F.jacobian() == parse("-4*I*(w1 - I*w2)", F.jacobian().ring)

    v = multiplicity(F, method=ALL, seed=3, trials=20)
    assert v.k_local_ring == 2 and v.k_count == 2 and v.agree


# ---------------------------------------------------------------------------


def test_nonextendable_candidate():
    data = _as_data(surface(M0))
    F, N = build_resolution_map(data)
    man = double_cover()
    for F, N, M in [(F, N, data.manifold()), (man.map, man.source, man.manifold)]:
        rep = nonextendable_candidate(F, N, M, seed=1)
        assert len(rep.checked_points) == 20
        assert rep.cr_ok and rep.vanishes_on_s and rep.s_points
        assert rep.phi == F.jacobian() * F.jacobian()
