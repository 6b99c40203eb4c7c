"""CR tangent dimension, CR singular locus, and pointwise CR structure."""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Sequence

from gmpy2 import mpq

from .algebra import GQ, AlgebraError, Polynomial, Ring, is_real_valued, parse
from .ideals import groebner_basis, ideal_membership
from .linalg import nullspace, rank
from .sampling import (Sample, _solve_slice, jacobian_rank, realify, sample_points,
                       to_complex_point)

GRAPH = "graph"
GENERAL = "general"

COMPLEX = "complex"
LEVI_FLAT = "Levi-flat"
TOTALLY_REAL = "totally-real"
CR_SINGULAR = "CR-singular"
MIXED = "mixed/unknown"


class NotOnManifold(ValueError):
    pass


class NotGeneric(ValueError):
    """All locus minors vanish identically: M is nowhere generic."""


class NotSmoothPoint(ValueError):
    pass


@dataclass
class ManifoldSpec:
    """Real submanifold of C^n, as a graph ``w = rho`` or real equations ``r_j = 0``.

    ``ring`` holds the ambient holomorphic coordinates and their conjugates.
    For graphs ``rho`` must not involve ``w``.
    """

    ring: Ring
    form: str
    rho: Polynomial | None = None
    graph_var: str = "w"
    equations: list[Polynomial] = field(default_factory=list)
    name: str = ""

    @classmethod
    def graph(cls, rho: str | Polynomial, zs: Sequence[str], w: str = "w", name: str = ""):
        ring = Ring.complex(list(zs) + [w])
        if isinstance(rho, str):
            rho = parse(rho, ring)
        else:
            rho = rho.to_ring(ring)
        if {w, f"conj({w})"} & rho.variables_used():
            raise AlgebraError("graph function must not involve the graph variable")
        return cls(ring, GRAPH, rho=rho, graph_var=w, name=name)

    @classmethod
    def general(cls, equations: Sequence[str | Polynomial], coords: Sequence[str], name: str = ""):
        ring = Ring.complex(list(coords))
        eqs = [parse(e, ring) if isinstance(e, str) else e.to_ring(ring) for e in equations]
        for e in eqs:
            if not is_real_valued(e):
                raise AlgebraError(f"defining function {e} is not real-valued")
        return cls(ring, GENERAL, equations=eqs, name=name)

    @property
    def n(self) -> int:
        return len(self.ring.holomorphic_names())

    @property
    def d(self) -> int:
        return 2 if self.form == GRAPH else len(self.equations)

    @property
    def coords(self) -> list[str]:
        return self.ring.holomorphic_names()

    @property
    def zs(self) -> list[str]:
        return [c for c in self.coords if c != self.graph_var] if self.form == GRAPH else self.coords

    def graph_equation(self) -> Polynomial:
        return self.ring.gen(self.graph_var) - self.rho

    def defining_functions(self) -> list[Polynomial]:
        if self.form == GRAPH:
            q = self.graph_equation()
            return [q.real_part(), q.imag_part()]
        return list(self.equations)

    def complex_equations(self) -> list[Polynomial]:
        """Generators of M's ideal with conjugates treated as independent."""
        if self.form == GRAPH:
            q = self.graph_equation()
            return [q, q.conj()]
        return list(self.equations)

    def contains(self, p: dict) -> bool:
        return all(r.evaluate(p).is_zero() for r in self.defining_functions())

    def point_from_z(self, zvals: dict) -> dict:
        """Complete a graph point from its ``z`` coordinates."""
        pt = dict(zvals)
        if self.form == GRAPH:
            pt[self.graph_var] = self.rho.evaluate({**zvals, self.graph_var: GQ(0)})
        return pt

    def validate(self, base: dict | None = None) -> None:
        base = base or {c: GQ(0) for c in self.coords}
        rring, reals = realify(self.defining_functions(), self.ring)
        vals = {}
        for c in self.coords:
            vals[f"x_{c}"] = base[c].re
            vals[f"y_{c}"] = base[c].im
        if jacobian_rank(reals, rring, vals) < self.d:
            raise AlgebraError("dr_1 ^ ... ^ dr_d vanishes at the base point")


def cr_matrix(M: ManifoldSpec) -> list[list[Polynomial]]:
    """``[d r_j / d conj(z_k)]`` as polynomials."""
    return [[r.diff(f"conj({c})") for c in M.coords] for r in M.defining_functions()]


def cr_tangent_dim(M: ManifoldSpec, p: dict) -> int:
    if not M.contains(p):
        raise NotOnManifold(f"point {_fmt_point(p)} is not on M")
    rows = [[e.evaluate(p) for e in row] for row in cr_matrix(M)]
    return M.n - rank(rows)


def _fmt_point(p: dict) -> str:
    return "{" + ", ".join(f"{k}: {v}" for k, v in p.items()) + "}"


@dataclass
class LocusDescription:
    manifold: ManifoldSpec
    equations: list[Polynomial]
    dim_real_at_generic_point: int | None = None
    cr_dim_at_generic_point: int | None = None
    classification: str = MIXED
    sampled_point: dict | None = None
    seed: int | None = None
    caveat: str = "dimension and structure certified at the sampled point only"

    def ideal_generators(self) -> list[Polynomial]:
        return list(self.equations) + self.manifold.complex_equations()

    def real_ideal_generators(self, max_factors: int = 4) -> list[Polynomial]:
        """``ideal_generators`` closed under conjugating single factors.

        At a real point ``conj(f)`` vanishes wherever ``f`` does, so each
        product obtained from a generator by conjugating some of its factors
        vanishes on the locus too.
        """
        gens = self.ideal_generators()
        gb = groebner_basis(gens)
        extra = []
        for g in self.equations:
            facs = gaussian_factors(g)
            if len(facs) > max_factors:
                continue
            for flips in itertools.product((False, True), repeat=len(facs)):
                q = g.ring.const(GQ(1))
                for f, fl in zip(facs, flips):
                    q = q * (f.conj() if fl else f)
                if not ideal_membership(q, gb, is_basis=True) and q not in extra:
                    extra.append(q)
        return gens + extra

    def contains(self, p: dict) -> bool:
        return self.manifold.contains(p) and all(e.evaluate(p).is_zero() for e in self.equations)


def _to_sympy(p: Polynomial, syms):
    import sympy

    acc = sympy.Integer(0)
    for e, c in p.terms.items():
        coef = sympy.Rational(int(c.re.numerator), int(c.re.denominator)) + \
            sympy.I * sympy.Rational(int(c.im.numerator), int(c.im.denominator))
        acc += coef * sympy.Mul(*[s ** k for s, k in zip(syms, e) if k])
    return acc


def _from_sympy(expr, syms, ring: Ring) -> Polynomial:
    import sympy

    terms = {}
    for mon, c in sympy.Poly(sympy.expand(expr), *syms).terms():
        re, im = sympy.re(c), sympy.im(c)
        terms[tuple(mon)] = GQ(mpq(int(re.p), int(re.q)), mpq(int(im.p), int(im.q)))
    return Polynomial(ring, terms)


def gaussian_factors(p: Polynomial) -> list[Polynomial]:
    """Non-constant irreducible factors over Q(i), with multiplicity, treating conj(z) as independent."""
    import sympy

    syms = sympy.symbols(f"v0:{len(p.ring.variables)}")
    _, facs = sympy.factor_list(_to_sympy(p, syms), *syms, gaussian=True)
    out = []
    for f, m in facs:
        q = _from_sympy(f, syms, p.ring)
        if not q.is_constant():
            out += [q] * m
    return out


def _dedupe(polys):
    out, seen = [], set()
    for p in polys:
        if p.is_zero():
            continue
        lead = p.sorted_terms()[0][1]
        q = p / lead
        if q not in seen:
            seen.add(q)
            out.append(p)
    return out


def graph_locus_equations(M: ManifoldSpec) -> list[Polynomial]:
    eqs = []
    for z in M.zs:
        dz = M.rho.diff(f"conj({z})")
        eqs += [dz, dz.conj()]
    return _dedupe(eqs)


def general_locus_equations(M: ManifoldSpec) -> list[Polynomial]:
    """Real and imaginary parts of all d x d minors of the CR matrix."""
    mat = cr_matrix(M)
    d = len(mat)
    eqs = []
    for cols in itertools.combinations(range(M.n), d):
        m = _poly_det([[mat[i][j] for j in cols] for i in range(d)], M.ring)
        eqs += [m.real_part(), m.imag_part()]
    return _dedupe(eqs)


def _poly_det(rows, ring):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = ring.zero()
    for j in range(n):
        if rows[0][j].is_zero():
            continue
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _poly_det(minor, ring)
        total = total + term if j % 2 == 0 else total - term
    return total


def _locus_real_system(M: ManifoldSpec, equations):
    """Real system whose zero set is S (in z-space for graphs)."""
    if M.form == GRAPH:
        zring = Ring.complex(M.zs)
        polys = [e.to_ring(zring) for e in equations]
        return (*realify(polys, zring), zring) if polys else (*_empty_chart(zring), zring)
    rring, reals = realify(list(equations) + M.defining_functions(), M.ring)
    return rring, reals, M.ring


def _empty_chart(zring):
    from .sampling import real_chart
    return real_chart(zring)[0], []


def cr_singular_locus(M: ManifoldSpec, seed: int = 0, samples: int = 3) -> LocusDescription:
    if M.form == GRAPH:
        eqs = graph_locus_equations(M)
    else:
        eqs = general_locus_equations(M)
    if not eqs:
        raise NotGeneric("M is not generic at any point (all minors vanish identically)")
    loc = LocusDescription(M, eqs, seed=seed)
    rng = random.Random(seed)
    rring, reals, cring = _locus_real_system(M, eqs)
    found = sample_points(reals, rring, rng, count=samples)
    if not found:
        return loc
    best = max(found, key=lambda s: s.dim)
    p = M.point_from_z(to_complex_point(cring, best.values))
    loc.sampled_point = p
    info = _tangent_structure(M, loc, p, best)
    loc.dim_real_at_generic_point = info["dim_real"]
    loc.cr_dim_at_generic_point = info["cr_dim"]
    loc.classification = info["classification"]
    return loc


@dataclass
class PointClassification:
    point: dict
    dim_real: int
    cr_dim: int
    classification: str
    certificate: dict


def _tangent_structure(M, loc, p, sample: Sample | None = None):
    rring, reals, cring = _locus_real_system(M, loc.equations)
    vals = {}
    for c in cring.holomorphic_names():
        vals[f"x_{c}"] = p[c].re
        vals[f"y_{c}"] = p[c].im
    pt = {n: GQ(vals[n]) for n in rring.names}
    jac = [[q.diff(n).evaluate(pt) for n in rring.names] for q in reals]
    kernel = nullspace(jac, len(rring.names)) if jac else nullspace([], len(rring.names))
    dim_real = len(kernel)
    vecs = [_push_tangent(M, cring, p, v) for v in kernel]
    flat = [[x for c in vec for x in (c.re, c.im)] for vec in vecs]
    jflat = [[x for c in vec for x in ((c * GQ(0, 1)).re, (c * GQ(0, 1)).im)] for vec in vecs]
    span = rank(flat + jflat) if flat else 0
    cr_dim = (2 * dim_real - span) // 2
    cert: dict = {"jacobian_rank": len(rring.names) - dim_real, "tangent_dim": dim_real,
                  "span_T_plus_JT": span}
    if dim_real > 0 and 2 * cr_dim == dim_real:
        cls = COMPLEX
    elif cr_dim == 0:
        cls = TOTALLY_REAL
    else:
        leaves = _leviflat_certificate(M, loc, cr_dim)
        if leaves:
            cls = LEVI_FLAT
            cert["complex_leaf_coordinates"] = leaves
        else:
            cls = MIXED
    return {"dim_real": dim_real, "cr_dim": cr_dim, "classification": cls, "certificate": cert}


def _push_tangent(M, cring, p, v):
    """Real tangent vector of the z-chart (or ambient chart) as a vector in C^n."""
    names = cring.holomorphic_names()
    dz = {c: v[2 * i] + GQ(0, 1) * v[2 * i + 1] for i, c in enumerate(names)}
    if M.form != GRAPH:
        return [dz[c] for c in M.coords]
    dw = GQ(0)
    for c in names:
        dw = dw + M.rho.diff(c).evaluate(p) * dz[c] + M.rho.diff(f"conj({c})").evaluate(p) * dz[c].conj()
    return [dz[c] if c != M.graph_var else dw for c in M.coords]


def _leviflat_certificate(M, loc, cr_dim) -> list[str] | None:
    """Coordinates ``A`` with rho holomorphic in z_A and S independent of z_A."""
    if M.form != GRAPH:
        return None
    free = []
    for z in M.zs:
        if not M.rho.diff(f"conj({z})").is_zero():
            continue
        if any({z, f"conj({z})"} & e.variables_used() for e in loc.equations):
            continue
        free.append(z)
    return free[:cr_dim] if len(free) >= cr_dim else None


def smooth_certificate(M: ManifoldSpec, loc: LocusDescription, p: dict, seed: int = 0) -> dict:
    """Rank of the locus Jacobian at ``p`` and at a re-solved perturbation."""
    rring, reals, cring = _locus_real_system(M, loc.equations)
    vals = {}
    for c in cring.holomorphic_names():
        vals[f"x_{c}"] = p[c].re
        vals[f"y_{c}"] = p[c].im
    r = jacobian_rank(reals, rring, vals)
    pt = {n: GQ(vals[n]) for n in rring.names}
    jac = [[q.diff(n).evaluate(pt) for n in rring.names] for q in reals]
    from .linalg import rref
    names = list(rring.names)
    if not jac or r == 0:
        return {"rank": r, "perturbed_rank": r, "perturbed_point": None}
    choices = []
    for order in (names, names[::-1]):
        cols = [names.index(n) for n in order]
        _, piv = rref([[row[c] for c in cols] for row in jac])
        choice = [order[i] for i in piv]
        if choice not in choices:
            choices.append(choice)
    rng = random.Random(seed)
    for unknowns in choices:
        for _ in range(6):
            eps = mpq(1, rng.choice([97, 101, 103, 107]))
            fixed = {n: vals[n] + (eps if rng.random() < 0.5 else -eps) for n in names if n not in unknowns}
            for sol in _solve_slice(reals, rring, unknowns, fixed):
                pv = {**fixed, **sol}
                r2 = jacobian_rank(reals, rring, pv)
                if r2 == r:
                    return {"rank": r, "perturbed_rank": r2,
                            "perturbed_point": {k: str(v) for k, v in pv.items()}}
    return {"rank": r, "perturbed_rank": None, "perturbed_point": None}


def classify_point(M: ManifoldSpec, loc: LocusDescription, p: dict, seed: int = 0) -> PointClassification:
    if not loc.contains(p):
        raise NotOnManifold(f"point {_fmt_point(p)} is not on the locus")
    cert = smooth_certificate(M, loc, p, seed)
    if cert["perturbed_rank"] is None:
        raise NotSmoothPoint(f"could not certify {_fmt_point(p)} as a smooth point of the locus")
    info = _tangent_structure(M, loc, p)
    info["certificate"]["smoothness"] = cert
    cls = info["classification"]
    if loc.cr_dim_at_generic_point is not None and info["cr_dim"] != loc.cr_dim_at_generic_point \
            and info["dim_real"] == loc.dim_real_at_generic_point:
        cls = CR_SINGULAR
    return PointClassification(p, info["dim_real"], info["cr_dim"], cls, info["certificate"])


# ---------------------------------------------------------------------------
# comparing loci as real sets


def vanishes_on_real_locus(g: Polynomial, gb, max_power: int = 3) -> str | None:
    """Certificate that ``g`` vanishes on the real points of ``V(gb)``.

    Returns ``"member"`` if ``g`` lies in the ideal, ``"norm^m"`` if
    ``(g * conj g)^m`` does (so ``|g|^2`` vanishes there), else None.
    """
    if ideal_membership(g, gb, is_basis=True):
        return "member"
    norm = g * g.conj()
    acc = norm
    for m in range(1, max_power + 1):
        if ideal_membership(acc, gb, is_basis=True):
            return f"norm^{m}"
        acc = acc * norm
    return None


def same_real_locus(a: Sequence[Polynomial], b: Sequence[Polynomial], exact: bool = False) -> dict:
    """Compare two loci; ``exact=True`` accepts plain ideal membership only."""
    ga, gbb = groebner_basis(list(a)), groebner_basis(list(b))
    power = 0 if exact else 3
    a_in_b = {str(x): vanishes_on_real_locus(x, gbb, power) for x in a}
    b_in_a = {str(y): vanishes_on_real_locus(y, ga, power) for y in b}
    ok = all(a_in_b.values()) and all(b_in_a.values())
    return {"equal": ok, "first_in_second": a_in_b, "second_in_first": b_in_a}
