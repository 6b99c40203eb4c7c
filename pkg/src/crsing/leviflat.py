"""Levi-flat CR singular images: leaves, leaf/locus intersections, obstructions, hypervarieties."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from .algebra import GQ, HOLOMORPHIC, AlgebraError, Polynomial, Ring, Variable
from .crlocus import (GRAPH, LocusDescription, ManifoldSpec, cr_singular_locus)
from .ideals import eliminate, groebner_basis, ideal_membership, is_unit_ideal
from .resolution import HoloMap, SourceManifold, graph_leviflat_resolution
from .sampling import realify, sample_points

LEVIFLAT = "LEVIFLAT"
COMPLEX = "COMPLEX"
NOT_LEVIFLAT = "NOT_LEVIFLAT"

EMPTY = "EMPTY"
CONSISTENT = "CONSISTENT"
NOT_A_CR_SINGULAR_IMAGE = "NOT_A_CR_SINGULAR_IMAGE"
REDUCIBLE_POSSIBLE = "REDUCIBLE_POSSIBLE"


def DIM(k: int) -> str:
    return f"DIM({k})"


class TheoremViolation(AssertionError):
    """A computed instance contradicts the leaf dichotomy for images."""


class Undecided(RuntimeError):
    pass


@dataclass
class LeafFamily:
    """Leaves ``L_t = {(s, t, rho(s, t, conj t))}`` parametrized by ``t`` in C."""

    manifold: ManifoldSpec
    leaf_var: str
    param_var: str
    j: int = 1

    def leaf(self, t: GQ) -> dict[str, Polynomial]:
        """Components of the leaf through parameter ``t`` as polynomials in ``s``."""
        ring = Ring.complex(["s"])
        M = self.manifold
        s = ring.gen("s")
        bind = {self.leaf_var: s, f"conj({self.leaf_var})": s.conj(),
                self.param_var: ring.const(t), f"conj({self.param_var})": ring.const(t.conj())}
        return {self.leaf_var: s, self.param_var: ring.const(t),
                M.graph_var: M.rho.subs({**bind, M.graph_var: ring.zero(),
                                         f"conj({M.graph_var})": ring.zero()}, ring)}

    def is_holomorphic(self, t: GQ) -> bool:
        return all("conj(s)" not in c.variables_used() for c in self.leaf(t).values())


@dataclass
class LeviFlatVerdict:
    verdict: str
    leaves: LeafFamily | None = None
    chart: tuple[HoloMap, SourceManifold] | None = None
    reason: str = ""

    def __bool__(self):
        return self.verdict == LEVIFLAT


def is_leviflat_graph(M: ManifoldSpec) -> LeviFlatVerdict:
    """Levi-flat at CR points when ``rho`` is holomorphic in one of the two variables."""
    if M.form != GRAPH or M.n != 3:
        return LeviFlatVerdict(NOT_LEVIFLAT, reason="criterion applies to graphs w = rho in C^3")
    z1, z2 = M.zs
    d1 = M.rho.diff(f"conj({z1})").is_zero()
    d2 = M.rho.diff(f"conj({z2})").is_zero()
    if d1 and d2:
        return LeviFlatVerdict(COMPLEX, reason="rho is holomorphic, M is complex analytic")
    if not d1 and not d2:
        return LeviFlatVerdict(NOT_LEVIFLAT, reason="rho depends on both conjugate variables")
    if not d1:
        z1, z2 = z2, z1
        spec = ManifoldSpec.graph(M.rho.to_ring(Ring.complex([z1, z2, M.graph_var])), [z1, z2], M.graph_var)
    else:
        spec = M
    fam = LeafFamily(M, z1, z2)
    return LeviFlatVerdict(LEVIFLAT, fam, graph_leviflat_resolution(spec),
                           reason=f"rho is holomorphic in {z1}")


# ---------------------------------------------------------------------------
# leaf / singular set


@dataclass
class LeafIntersection:
    verdict: str
    parameter: GQ
    certificate: dict = field(default_factory=dict)


def leaf_singular_intersection(S: LocusDescription, fam: LeafFamily, t: GQ,
                               seed: int = 0) -> LeafIntersection:
    """``S ∩ L_t`` as EMPTY, DIM(j-1) or DIM(j); anything else is a theorem violation."""
    leaf = fam.leaf(t)
    ring = Ring.complex(["s"])
    bind = {}
    for name, comp in leaf.items():
        bind[name] = comp
        bind[f"conj({name})"] = comp.conj()
    eqs = [e.subs(bind, ring) for e in S.equations]
    eqs = [e for e in eqs if not e.is_zero()]
    j = fam.j
    if not eqs:
        return LeafIntersection(DIM(j), t, {"reason": "locus equations vanish identically on the leaf"})
    C = Ring([Variable("s", HOLOMORPHIC, None), Variable("sigma", HOLOMORPHIC, None)])
    ceqs = [Polynomial(C, e.terms) for e in eqs]
    gb = groebner_basis(ceqs)
    if is_unit_ideal(gb):
        return LeafIntersection(EMPTY, t, {"reason": "complexified ideal is the unit ideal"})
    rring, reals = realify(eqs, ring)
    found = sample_points(reals, rring, random.Random(seed), count=1)
    if not found:
        raise Undecided(f"no real point found on S ∩ L_t for t = {t}")
    dim = found[0].dim
    cert = {"complexified_basis": [str(g) for g in gb.generators],
            "sample": {k: str(v) for k, v in found[0].values.items()}, "real_dim_at_sample": dim}
    if dim == 2 * (j - 1):
        return LeafIntersection(DIM(j - 1), t, cert)
    if dim == 2 * j:
        return LeafIntersection(DIM(j), t, cert)
    raise TheoremViolation(f"S ∩ L_t has real dimension {dim} at a sampled point (t = {t})")


def leaf_grid(center: GQ, half_width: mpq = mpq(1, 2), steps: int = 5) -> list[GQ]:
    vals = [mpq(k, steps - 1) * 2 * half_width - half_width for k in range(steps)]
    return [GQ(center.re + a, center.im + b) for a in vals for b in vals]


@dataclass
class NeighbourhoodCheck:
    center: GQ
    verdicts: list[LeafIntersection]

    @property
    def all_meet(self) -> bool:
        return all(v.verdict != EMPTY for v in self.verdicts)


def nearby_leaves_meet(S: LocusDescription, fam: LeafFamily, center: GQ, seed: int = 0
                       ) -> NeighbourhoodCheck:
    return NeighbourhoodCheck(center, [leaf_singular_intersection(S, fam, t, seed)
                                       for t in leaf_grid(center)])


# ---------------------------------------------------------------------------
# dimension obstruction


@dataclass
class ObstructionReport:
    verdict: str
    dim_s: int
    bound: int
    leviflat_basis: str


def dimension_obstruction(M: ManifoldSpec, S: LocusDescription | None = None,
                          leviflat_assertion: str | None = None, seed: int = 0) -> ObstructionReport:
    """An image of a Levi-flat manifold has ``dim S >= 2(n - d)``; fewer rules it out."""
    if leviflat_assertion is None:
        lf = is_leviflat_graph(M)
        if not lf:
            raise AlgebraError("M is not certified Levi-flat at CR points; "
                               "pass leviflat_assertion to record the reason")
        leviflat_assertion = lf.reason
    S = S or cr_singular_locus(M, seed=seed)
    if S.dim_real_at_generic_point is None:
        raise AlgebraError("S has no sampled points; no obstruction applies")
    bound = 2 * (M.n - M.d)
    verdict = NOT_A_CR_SINGULAR_IMAGE if S.dim_real_at_generic_point < bound else CONSISTENT
    return ObstructionReport(verdict, S.dim_real_at_generic_point, bound, leviflat_assertion)


# ---------------------------------------------------------------------------
# hypervarieties


def orbit_hypersurface(source_names: Sequence[str], orbit_vars: Sequence[str],
                       v: Sequence[int | mpq]) -> Polynomial:
    """``Im <w'', v>`` as a real polynomial in the source coordinates."""
    ring = Ring.complex(list(source_names))
    acc = ring.zero()
    for name, c in zip(orbit_vars, v):
        acc = acc + ring.gen(name) * GQ(c)
    return acc.imag_part()


@dataclass
class Hypervariety:
    polynomial: Polynomial
    generators: list[Polynomial]
    flag: str = REDUCIBLE_POSSIBLE


def push_forward_hypersurface(F: HoloMap, h: Polynomial) -> Hypervariety:
    """Image of the real hypersurface ``{h = 0}`` via the complexified graph of ``(F, conj F)``."""
    src = F.source_names
    tgt = Ring.complex(F.target_names)
    vs = [Variable(n, HOLOMORPHIC, None) for n in src]
    vs += [Variable(f"xi_{n}", HOLOMORPHIC, None) for n in src]
    E = Ring(vs + list(tgt.variables))
    to_e = {n: E.gen(n) for n in src}
    to_e_bar = {n: E.gen(f"xi_{n}") for n in src}
    gens = []
    for name, f in zip(F.target_names, F.components):
        gens.append(E.gen(name) - f.subs(to_e, E))
        fbar = Polynomial(f.ring, {e: c.conj() for e, c in f.terms.items()})
        gens.append(E.gen(f"conj({name})") - fbar.subs(to_e_bar, E))
    hb = {n: E.gen(n) for n in src}
    hb.update({f"conj({n})": E.gen(f"xi_{n}") for n in src})
    gens.append(h.subs(hb, E))
    elim = eliminate(gens, src + [f"xi_{n}" for n in src])
    out = [g.to_ring(tgt) for g in elim.generators]
    if not out:
        raise AlgebraError("image of the hypersurface is not contained in a hypervariety")
    best = min(out, key=lambda g: (g.degree(), len(g.terms)))
    lead = best.sorted_terms()[0][1]
    return Hypervariety(best / lead, out)


def leviflat_hypervarieties(F: HoloMap, hypersurfaces: Sequence[Polynomial]) -> list[Hypervariety]:
    return [push_forward_hypersurface(F, h) for h in hypersurfaces]


def verify_containment(polys: Sequence[Polynomial], M: ManifoldSpec) -> list[bool]:
    """Each polynomial lies in the complexified ideal of M (so vanishes on M)."""
    if M.form == GRAPH:
        w = M.graph_var
        sub = {w: M.rho, f"conj({w})": M.rho.conj()}
        return [p.to_ring(M.ring).subs(sub, M.ring).is_zero() for p in polys]
    gb = groebner_basis(M.complex_equations())
    return [ideal_membership(p.to_ring(M.ring), gb, is_basis=True) for p in polys]
