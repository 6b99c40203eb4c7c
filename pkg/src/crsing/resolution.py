"""Resolution maps of CR singular images and pullback of the singular locus.

A source manifold ``N`` is carried as a real polynomial parametrization
``u -> t(u)`` of its points in C^n.  The three shapes used in practice are
R^n (totally real), R^d x C^(n-d) (Levi-flat) and an explicit
parametrization (any generic N the caller can parametrize).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

from .algebra import (DEFAULT_DEGREE_CAP, GQ, I_UNIT, AlgebraError, Polynomial, Ring,
                      is_real_valued, parse)
from .crlocus import (GENERAL, GRAPH, LocusDescription, ManifoldSpec, NotGeneric,
                      cr_matrix, cr_singular_locus, cr_tangent_dim)
from .linalg import nullspace, rank, solve
from .sampling import random_rational, sample_points

TOTALLY_REAL = "totally-real"
LEVIFLAT = "Levi-flat"
PARAMETRIZED = "parametrized"


class PreconditionError(ValueError):
    pass


# ---------------------------------------------------------------------------
# normal-form data


@dataclass
class NormalFormData:
    """``z_n = rho(z1, conj z1, x')`` and ``y_a = r_a(z1, conj z1, x')``."""

    n: int
    rho: Polynomial
    rs: list[Polynomial]

    @staticmethod
    def make_ring(n: int) -> Ring:
        return Ring.complex(["z1"], real=[f"x{a}" for a in range(2, n)])

    @classmethod
    def from_strings(cls, n: int, rho: str, rs: Sequence[str] = ()) -> "NormalFormData":
        if n < 2:
            raise AlgebraError("normal form needs n >= 2")
        ring = cls.make_ring(n)
        rs = list(rs) or ["0"] * (n - 2)
        if len(rs) != n - 2:
            raise AlgebraError(f"expected {n - 2} functions r_2..r_{n - 1}, got {len(rs)}")
        data = cls(n, parse(rho, ring), [parse(r, ring) for r in rs])
        data.check()
        return data

    @property
    def ring(self) -> Ring:
        return self.rho.ring

    def check(self) -> None:
        for r in self.rs:
            if not is_real_valued(r):
                raise AlgebraError(f"r_a = {r} is not real-valued")
        for p in [self.rho, *self.rs]:
            if not p.constant_term().is_zero() or not p.homogeneous_part(1).is_zero():
                raise AlgebraError(f"{p} has constant or linear terms")

    def harmonic_part(self, r: Polynomial) -> Polynomial:
        """Terms of ``r`` that are pure powers of ``z1`` (no conj, no x')."""
        i = self.ring.index["z1"]
        return Polynomial(self.ring, {e: c for e, c in r.terms.items()
                                      if sum(e) == e[i] and e[i] > 0})

    def has_no_harmonic_terms(self) -> bool:
        # r real, so pure conj(z1) terms vanish iff pure z1 terms do
        return all(self.harmonic_part(r).is_zero() for r in self.rs)

    def manifold(self) -> ManifoldSpec:
        """The image manifold M in coordinates z1..zn."""
        n = self.n
        if n == 2:
            return ManifoldSpec.graph(self.rho.subs({}, Ring.complex(["z1", "z2"])), ["z1"], w="z2")
        names = [f"z{k}" for k in range(1, n + 1)]
        ring = Ring.complex(names)
        bind = {"z1": ring.gen("z1"), "conj(z1)": ring.gen("conj(z1)")}
        for a in range(2, n):
            za = ring.gen(f"z{a}")
            bind[f"x{a}"] = (za + za.conj()) / 2
        zn = ring.gen(f"z{n}")
        q = zn - self.rho.subs(bind, ring)
        eqs = [q.real_part(), q.imag_part()]
        for a, r in zip(range(2, n), self.rs):
            za = ring.gen(f"z{a}")
            eqs.append((za - za.conj()) / GQ(0, 2) - r.subs(bind, ring))
        return ManifoldSpec(ring, GENERAL, equations=eqs, name="normal form")


@dataclass
class CoordinateChange:
    """``z_a' = z_a - 2i H_a(z1)`` for each ``a``, with flags from the elimination."""

    shifts: dict[str, Polynomial] = field(default_factory=dict)
    truncated_at: int | None = None
    x_coupled_terms: dict[str, list[str]] = field(default_factory=dict)

    def is_identity(self) -> bool:
        return all(h.is_zero() for h in self.shifts.values())

    def describe(self) -> dict:
        return {f"z{a[1:]}": f"z{a[1:]} - 2*I*({h})" for a, h in self.shifts.items() if not h.is_zero()}


def eliminate_harmonic_terms(data: NormalFormData, cap: int = DEFAULT_DEGREE_CAP
                             ) -> tuple[NormalFormData, CoordinateChange]:
    """Absorb the harmonic part of each r_a into a holomorphic change of z_a."""
    ring = data.ring
    xs = [f"x{a}" for a in range(2, data.n)]
    rho, rs = data.rho, list(data.rs)
    total = {x: ring.zero() for x in xs}
    change = CoordinateChange()
    for _ in range(cap + 1):
        hs = {x: data.harmonic_part(r) for x, r in zip(xs, rs)}
        if all(h.is_zero() for h in hs.values()):
            break
        bind = {x: ring.gen(x) + I_UNIT * (h - h.conj()) for x, h in hs.items()}
        rho = rho.subs(bind, ring, cap=cap)
        rs = [r.subs(bind, ring, cap=cap) - (hs[x] + hs[x].conj()) for x, r in zip(xs, rs)]
        for x in xs:
            total[x] = total[x] + hs[x]
        change.truncated_at = cap
    else:
        change.truncated_at = cap
    if all(h.is_zero() for h in total.values()):
        change.truncated_at = None
    change.shifts = total
    zi = ring.index["z1"]
    for x, r in zip(xs, rs):
        flagged = [str(Polynomial(ring, {e: c})) for e, c in r.sorted_terms()
                   if any(e[ring.index[y]] for y in xs) and
                   sum(e) - sum(e[ring.index[y]] for y in xs) == e[zi] and e[zi] > 0]
        if flagged:
            change.x_coupled_terms[x] = flagged
    return NormalFormData(data.n, rho, rs), change


def invert_change(new: NormalFormData, change: CoordinateChange, cap: int = DEFAULT_DEGREE_CAP
                  ) -> NormalFormData:
    """Undo ``eliminate_harmonic_terms`` (exact up to ``cap``)."""
    ring = new.ring
    xs = [f"x{a}" for a in range(2, new.n)]
    bind = {x: ring.gen(x) - I_UNIT * (change.shifts[x] - change.shifts[x].conj()) for x in xs}
    rho = new.rho.subs(bind, ring, cap=cap)
    rs = [r.subs(bind, ring, cap=cap) + change.shifts[x] + change.shifts[x].conj()
          for x, r in zip(xs, new.rs)]
    return NormalFormData(new.n, rho, rs)


# ---------------------------------------------------------------------------
# holomorphic maps and source manifolds


@dataclass
class HoloMap:
    components: list[Polynomial]
    base_point: dict = field(default_factory=dict)
    target_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        if not self.base_point:
            self.base_point = {n: GQ(0) for n in self.ring.holomorphic_names()}
        if not self.target_names:
            self.target_names = [f"z{k}" for k in range(1, len(self.components) + 1)]
        for c in self.components:
            if not c.evaluate(self.base_point).is_zero():
                raise AlgebraError("map components must vanish at the base point")

    @property
    def ring(self) -> Ring:
        return self.components[0].ring

    @property
    def source_names(self) -> list[str]:
        return self.ring.holomorphic_names()

    @classmethod
    def from_strings(cls, source: Sequence[str], comps: Sequence[str],
                     target_names: Sequence[str] = ()) -> "HoloMap":
        ring = Ring.complex(list(source), conj=False)
        return cls([parse(c, ring) for c in comps], target_names=list(target_names))

    def jacobian_matrix(self) -> list[list[Polynomial]]:
        return [[f.diff(t) for t in self.source_names] for f in self.components]

    def jacobian(self) -> Polynomial:
        return _poly_det(self.jacobian_matrix(), self.ring)

    def __call__(self, point: dict) -> dict:
        return {name: f.evaluate(point) for name, f in zip(self.target_names, self.components)}


def _poly_det(rows, ring):
    from .crlocus import _poly_det as pd
    return pd(rows, ring)


@dataclass
class SourceManifold:
    """A generic manifold ``N`` given by ``t_k = param[t_k](u)`` with real ``u``."""

    kind: str
    params: Ring
    param: dict[str, Polynomial]

    @classmethod
    def totally_real(cls, names: Sequence[str]) -> "SourceManifold":
        pr = Ring.real(list(names))
        return cls(TOTALLY_REAL, pr, {n: pr.gen(n) for n in names})

    @classmethod
    def leviflat(cls, real: Sequence[str], complex_: Sequence[str]) -> "SourceManifold":
        pnames = list(real) + [f"{p}_{c}" for c in complex_ for p in ("re", "im")]
        pr = Ring.real(pnames)
        param = {n: pr.gen(n) for n in real}
        for c in complex_:
            param[c] = pr.gen(f"re_{c}") + I_UNIT * pr.gen(f"im_{c}")
        return cls(LEVIFLAT, pr, param)

    @classmethod
    def parametrized(cls, params: Sequence[str], exprs: dict[str, str]) -> "SourceManifold":
        pr = Ring.real(list(params))
        return cls(PARAMETRIZED, pr, {k: parse(v, pr) for k, v in exprs.items()})

    def compose(self, p: Polynomial) -> Polynomial:
        """``p(t(u))`` for ``p`` holomorphic in the source coordinates."""
        return p.subs(self.param, self.params)

    def point(self, u: dict) -> dict:
        return {t: e.evaluate(u) for t, e in self.param.items()}

    def random_params(self, rng: random.Random) -> dict:
        return {n: GQ(random_rational(rng, nonzero=False)) for n in self.params.names}


def _target_bindings(F: HoloMap, N: SourceManifold, M: ManifoldSpec):
    comps = [N.compose(f) for f in F.components]
    bind = {}
    for name, c in zip(F.target_names, comps):
        bind[name] = c
        bind[f"conj({name})"] = c.conj()
    for v in M.ring.names:
        if v not in bind:
            raise AlgebraError(f"map has no component for target coordinate {v!r}")
    return comps, bind


def verify_parametrization(F: HoloMap, N: SourceManifold, M: ManifoldSpec) -> bool:
    """``F(N)`` lies in ``M``: every defining function composes to 0 identically."""
    _, bind = _target_bindings(F, N, M)
    return all(r.subs(bind, N.params).is_zero() for r in M.defining_functions())


def real_differential(F: HoloMap, N: SourceManifold, u: dict) -> list[list[GQ]]:
    """Columns ``d(F o t)/du_i`` at ``u`` as complex n-vectors (rows = components)."""
    comps = [N.compose(f) for f in F.components]
    return [[c.diff(p).evaluate(u) for p in N.params.names] for c in comps]


def immersion_rank(F: HoloMap, N: SourceManifold, u: dict | None = None) -> int:
    u = u or {n: GQ(0) for n in N.params.names}
    d = real_differential(F, N, u)
    rows = [[x.re for x in row] for row in d] + [[x.im for x in row] for row in d]
    return rank(rows)


def build_resolution_map(data: NormalFormData) -> tuple[HoloMap, SourceManifold]:
    """The map F of the normal form together with N = R^n; f = F restricted to N."""
    if not data.has_no_harmonic_terms():
        raise PreconditionError("r_a(0, conj z1, 0) is not identically zero; "
                                "run eliminate_harmonic_terms first")
    n = data.n
    tnames = [f"t{k}" for k in range(1, n + 1)]
    T = Ring.complex(tnames, conj=False)
    t1, tn = T.gen("t1"), T.gen(f"t{n}")
    bind = {"z1": t1 + I_UNIT * tn, "conj(z1)": t1 - I_UNIT * tn}
    for a in range(2, n):
        bind[f"x{a}"] = T.gen(f"t{a}")
    comps = [t1 + I_UNIT * tn]
    comps += [T.gen(f"t{a}") + I_UNIT * r.subs(bind, T) for a, r in zip(range(2, n), data.rs)]
    comps.append(data.rho.subs(bind, T))
    F = HoloMap(comps, target_names=[f"z{k}" for k in range(1, n + 1)])
    N = SourceManifold.totally_real(tnames)
    if not verify_parametrization(F, N, data.manifold()):
        raise AlgebraError("internal: resolution map does not parametrize M")
    return F, N


def graph_leviflat_resolution(M: ManifoldSpec) -> tuple[HoloMap, SourceManifold]:
    """For ``w = rho(z1, z2, conj z2)`` (no conj z1): ``(a, b, xi) -> (xi, a+ib, rho)``."""
    if M.form != GRAPH or M.n != 3:
        raise PreconditionError("needs a graph w = rho(z1, z2) in C^3")
    z1, z2 = M.zs
    if not M.rho.diff(f"conj({z1})").is_zero():
        raise PreconditionError(f"rho depends on conj({z1})")
    T = Ring.complex(["a", "b", "xi"], conj=False)
    a, b, xi = T.gens()
    bind = {z1: xi, z2: a + I_UNIT * b, f"conj({z2})": a - I_UNIT * b}
    comps = [xi, a + I_UNIT * b, M.rho.subs(bind, T)]
    F = HoloMap(comps, target_names=[z1, z2, M.graph_var])
    N = SourceManifold.leviflat(["a", "b"], ["xi"])
    return F, N


# ---------------------------------------------------------------------------
# pullback of S and the non-extendable candidate


@dataclass
class PullbackReport:
    jacobian: Polynomial
    singular_samples: list[dict]
    regular_samples: list[dict]
    singular_ok: bool
    regular_ok: bool
    seed: int
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.singular_ok and self.regular_ok and bool(self.singular_samples)


def _jacobian_on_n(F, N):
    J = F.jacobian()
    if J.is_zero():
        raise NotGeneric("J_F vanishes identically: the image is nowhere generic")
    return J, N.compose(J)


def sample_jacobian_zeros(F: HoloMap, N: SourceManifold, rng: random.Random, count: int = 5):
    _, Ju = _jacobian_on_n(F, N)
    parts = [p for p in (Ju.real_part(), Ju.imag_part()) if not p.is_zero()]
    found = sample_points(parts, N.params, rng, count=count)
    return [{k: GQ(v) for k, v in s.values.items()} for s in found]


def sample_regular(F: HoloMap, N: SourceManifold, rng: random.Random, count: int = 20):
    _, Ju = _jacobian_on_n(F, N)
    out = []
    while len(out) < count:
        u = N.random_params(rng)
        if not Ju.evaluate(u).is_zero():
            out.append(u)
    return out


def pullback_singular_locus(F: HoloMap, N: SourceManifold, M: ManifoldSpec,
                            L: LocusDescription | None = None, seed: int = 0,
                            count: int = 20, zero_count: int = 5) -> PullbackReport:
    """``f^-1(S) = {J_F = 0} ∩ N``, checked at exact sample points."""
    J, _ = _jacobian_on_n(F, N)
    L = L or cr_singular_locus(M, seed=seed)
    rng = random.Random(seed)
    zeros = sample_jacobian_zeros(F, N, rng, zero_count)
    regular = sample_regular(F, N, rng, count)
    rep = PullbackReport(J, zeros, regular, True, True, seed)
    generic = M.n - M.d
    for u in zeros:
        p = F(N.point(u))
        if not L.contains(p):
            rep.singular_ok = False
            rep.failures.append(f"J_F = 0 at u={_fmt(u)} but F(u) not in S")
    for u in regular:
        p = F(N.point(u))
        if L.contains(p) or cr_tangent_dim(M, p) != generic:
            rep.regular_ok = False
            rep.failures.append(f"J_F != 0 at u={_fmt(u)} but F(u) is CR singular")
    return rep


def _fmt(u):
    return "{" + ", ".join(f"{k}: {v}" for k, v in u.items()) + "}"


@dataclass
class CandidateReport:
    phi: Polynomial
    checked_points: list[dict]
    cr_dimension: int
    cr_ok: bool
    vanishes_on_s: bool
    seed: int
    failures: list[str] = field(default_factory=list)
    s_points: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.cr_ok and self.vanishes_on_s and bool(self.checked_points) and bool(self.s_points)


def _lift_vector(D: list[list[GQ]], target: list[GQ]):
    """Real ``v`` with ``D v = target`` (complex rows split into real/imag)."""
    rows = [[x.re for x in row] for row in D] + [[x.im for x in row] for row in D]
    rhs = [t.re for t in target] + [t.im for t in target]
    return solve(rows, rhs)


def tangential_cr_values(F: HoloMap, N: SourceManifold, M: ManifoldSpec, phi_u: Polynomial,
                         u: dict) -> list[GQ]:
    """``L(phi)`` at ``F(u)`` for a basis ``L`` of T^{0,1} M there."""
    p = F(N.point(u))
    A = [[e.evaluate(p) for e in row] for row in cr_matrix(M)]
    D = real_differential(F, N, u)
    grad = [phi_u.diff(x).evaluate(u) for x in N.params.names]
    out = []
    for c in nullspace(A, M.n):
        vals = []
        for dz in ([x.conj() for x in c], [I_UNIT * x.conj() for x in c]):
            v = _lift_vector(D, dz)
            if v is None:
                raise AlgebraError(f"complex tangent vector at u={_fmt(u)} is not in the image of df")
            vals.append(sum((g * vi for g, vi in zip(grad, v)), GQ(0)))
        out.append((vals[0] + I_UNIT * vals[1]) / 2)
    return out


def nonextendable_candidate(F: HoloMap, N: SourceManifold, M: ManifoldSpec,
                            L: LocusDescription | None = None, seed: int = 0,
                            count: int = 20) -> CandidateReport:
    """``phi = J_F^2 o f^-1``: CR on M minus S and zero on S, at sampled points."""
    J, Ju = _jacobian_on_n(F, N)
    phi = J * J
    phi_u = N.compose(phi)
    L = L or cr_singular_locus(M, seed=seed)
    rng = random.Random(seed)
    pts = sample_regular(F, N, rng, count)
    rep = CandidateReport(phi, pts, M.n - M.d, True, True, seed)
    for u in pts:
        p = F(N.point(u))
        if L.contains(p):
            continue
        vals = tangential_cr_values(F, N, M, phi_u, u)
        if any(not v.is_zero() for v in vals):
            rep.cr_ok = False
            rep.failures.append(f"L(phi) != 0 at u={_fmt(u)}")
    for u in sample_jacobian_zeros(F, N, rng, 5):
        rep.s_points.append(u)
        p = F(N.point(u))
        if not L.contains(p) or not phi_u.evaluate(u).is_zero():
            rep.vanishes_on_s = False
            rep.failures.append(f"phi != 0 on S at u={_fmt(u)}")
    return rep
