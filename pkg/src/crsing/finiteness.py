"""Finiteness of the resolution map and its multiplicity, computed three ways.

``order``       order of vanishing of rho(0, conj z1, 0)
``local_ring``  dim of the local algebra O_0 / (F) via a Mora standard basis
``count``       number of preimages of a small generic target near 0
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

import mpmath

from .algebra import (DEFAULT_DEGREE_CAP, GQ, I_UNIT, INFINITE, AlgebraError, Polynomial,
                      Ring, TruncatedSeries, UnknownBeyond, order_of_vanishing)
from .crlocus import GRAPH, ManifoldSpec
from .ideals import (CapExceeded, MonomialOrder, LEX, groebner_basis, is_unit_ideal,
                     krull_dimension, leading_monomials, local_multiplicity)
from .linalg import det, inverse
from .resolution import HoloMap, NormalFormData, build_resolution_map

ORDER = "order"
LOCAL_RING = "local_ring"
COUNT = "count"
ALL = "all"

CONFIRMED = "CONFIRMED"
DISAGREE = "DISAGREE"
PARTIAL = "PARTIAL"
CAPPED = "CAPPED"
FAILED = "FAILED"

DEFAULT_RADIUS = GQ(1, 0) / 10
DEFAULT_TARGET = GQ(1, 0) / 1000
PRECISION_BITS = 128


# ---------------------------------------------------------------------------
# finiteness


@dataclass
class FinitenessResult:
    finite: bool | None
    witness: Polynomial | TruncatedSeries
    order: int | float | UnknownBeyond

    def __bool__(self):
        return bool(self.finite)


def _as_data(obj) -> NormalFormData:
    if isinstance(obj, NormalFormData):
        return obj
    if isinstance(obj, ManifoldSpec) and obj.form == GRAPH and obj.n == 2:
        z = obj.zs[0]
        ring = NormalFormData.make_ring(2)
        rho = obj.rho.subs({z: ring.gen("z1"), f"conj({z})": ring.gen("conj(z1)")}, ring)
        return NormalFormData(2, rho, [])
    raise AlgebraError("expected normal-form data or a graph surface in C^2")


def restricted_rho(data: NormalFormData) -> Polynomial:
    """``rho(0, conj z1, 0)``: the pure conj(z1) terms of rho."""
    ring = data.ring
    zb = ring.index["conj(z1)"]
    return Polynomial(ring, {e: c for e, c in data.rho.terms.items() if sum(e) == e[zb]})


def finiteness_test(obj) -> FinitenessResult:
    """``F`` is finite iff ``rho(0, conj z1, 0)`` is not identically zero."""
    if isinstance(obj, TruncatedSeries):
        ring = obj.poly.ring
        zb = next(v.name for v in ring.variables if v.name.startswith("conj("))
        i = ring.index[zb]
        w = TruncatedSeries(Polynomial(ring, {e: c for e, c in obj.poly.terms.items()
                                              if sum(e) == e[i]}), obj.cap)
        if w.is_zero():
            return FinitenessResult(None, w, UnknownBeyond(obj.cap))
        return FinitenessResult(True, w, order_of_vanishing(w))
    data = _as_data(obj)
    w = restricted_rho(data)
    if w.is_zero():
        return FinitenessResult(False, w, INFINITE)
    return FinitenessResult(True, w, w.order())


def codim2_membership_witness(F: HoloMap) -> bool:
    """For n = 2, ``F_n`` lies in the ideal of the other components."""
    from .ideals import ideal_membership
    return ideal_membership(F.components[-1], groebner_basis(F.components[:-1]))


# ---------------------------------------------------------------------------
# implicit series


def implicit_series_solve(equations: Sequence[Polynomial], unknowns: Sequence[str],
                          cap: int = DEFAULT_DEGREE_CAP) -> dict[str, TruncatedSeries]:
    """Formal solution ``t = phi(params)`` of ``G(t, params) = 0`` to degree ``cap``.

    ``G`` must vanish at the origin and have an invertible linear part in ``t``.
    Every variable not listed in ``unknowns`` is a parameter.
    """
    if not equations:
        return {}
    ring = equations[0].ring
    unknowns = list(unknowns)
    if len(unknowns) != len(equations):
        raise AlgebraError("need as many equations as unknowns")
    zero = {n: GQ(0) for n in ring.names}
    A = [[g.diff(t).evaluate(zero) for t in unknowns] for g in equations]
    try:
        Ainv = inverse(A)
    except ZeroDivisionError:
        raise AlgebraError("linear part in the unknowns is not invertible") from None
    for g in equations:
        if not g.evaluate(zero).is_zero():
            raise AlgebraError("equations must vanish at the origin")
    params = [n for n in ring.names if n not in unknowns]
    pring = Ring(v for v in ring.variables if v.name in params)
    sol = {t: pring.zero() for t in unknowns}
    lift = {n: pring.gen(n) for n in params}
    for _ in range(cap + 1):
        G = [g.subs({**lift, **sol}, pring, cap=cap) for g in equations]
        if all(x.is_zero() for x in G):
            break
        sol = {t: (sol[t] - sum((Ainv[i][j] * G[j] for j in range(len(G))), pring.zero())).truncate(cap)
               for i, t in enumerate(unknowns)}
    return {t: TruncatedSeries(p, cap) for t, p in sol.items()}


# ---------------------------------------------------------------------------
# certified root counting


@dataclass
class CountResult:
    count: int | None
    status: str
    target: dict | None = None
    roots: list = field(default_factory=list)
    diagnostics: str = ""


def _mpc(c: GQ):
    return mpmath.mpc(mpmath.mpf(int(c.re.numerator)) / int(c.re.denominator),
                      mpmath.mpf(int(c.im.numerator)) / int(c.im.denominator))


def count_roots_in_disc(coeffs: Sequence[GQ], radius, prec: int = PRECISION_BITS) -> CountResult:
    """Roots of ``sum coeffs[k] t^k`` in ``|t| < radius``, certified by inclusion discs.

    Approximations come from ``mpmath.polyroots``; each gets a Weierstrass
    disc of radius ``deg * |W_i|``.  Pairwise-disjoint discs each hold one
    root; every disc must lie strictly inside or outside the circle.
    """
    coeffs = list(coeffs)
    while coeffs and coeffs[-1].is_zero():
        coeffs.pop()
    deg = len(coeffs) - 1
    if deg < 0:
        return CountResult(None, FAILED, diagnostics="polynomial is identically zero")
    if deg == 0:
        return CountResult(0, "OK")
    with mpmath.workprec(prec):
        cs = [_mpc(c) for c in reversed(coeffs)]
        R = mpmath.mpf(int(radius.re.numerator)) / int(radius.re.denominator)
        try:
            roots = mpmath.polyroots(cs, maxsteps=200, extraprec=prec)
        except mpmath.libmp.NoConvergence:
            return CountResult(None, FAILED, diagnostics="root finder did not converge")
        roots = list(roots) if deg > 1 else [roots[0]] if isinstance(roots, list) else [roots]
        slack = mpmath.mpf(2) ** (-prec // 2)
        discs = []
        for i, z in enumerate(roots):
            den = cs[0]
            for j, w in enumerate(roots):
                if j != i:
                    den *= z - w
            if den == 0:
                return CountResult(None, FAILED, diagnostics="coincident root approximations")
            W = mpmath.polyval(cs, z) / den
            discs.append((z, deg * abs(W) + slack * (1 + abs(z))))
        for i in range(deg):
            for j in range(i + 1, deg):
                if abs(discs[i][0] - discs[j][0]) <= discs[i][1] + discs[j][1]:
                    return CountResult(None, FAILED, diagnostics="inclusion discs overlap")
        inside = 0
        for z, r in discs:
            if abs(z) + r < R:
                inside += 1
            elif abs(z) - r > R:
                continue
            else:
                return CountResult(None, FAILED, diagnostics="root within certification width of the circle")
        return CountResult(inside, "OK", roots=[complex(z) for z, _ in discs])


def random_target(rng: random.Random, names: Sequence[str], magnitude: GQ) -> dict:
    out = {}
    for n in names:
        re = rng.randint(-1000, 1000)
        im = rng.randint(-1000, 1000)
        if re == 0 and im == 0:
            re = 1
        out[n] = GQ(re, im) * magnitude / 1000
    return out


def _univariate_coeffs(p: Polynomial, name: str) -> list[GQ]:
    deg = p.degree_in(name)
    coeffs = [GQ(0)] * (deg + 1)
    i = p.ring.index[name]
    for e, c in p.terms.items():
        coeffs[e[i]] = coeffs[e[i]] + c
    return coeffs


class PreimageEquation:
    """The univariate equation in ``t1`` for the normal-form map, with symbolic targets."""

    def __init__(self, data: NormalFormData, cap: int):
        n = data.n
        self.n = n
        self.cap = cap
        tprime = [f"t{a}" for a in range(2, n)]
        self.zetas = [f"zeta{k}" for k in range(1, n + 1)]
        ring = Ring.complex(["t1", *self.zetas, *tprime], conj=False)
        t1, z1 = ring.gen("t1"), ring.gen("zeta1")
        bind = {"z1": z1, "conj(z1)": 2 * t1 - z1}
        for a in range(2, n):
            bind[f"x{a}"] = ring.gen(f"t{a}")
        eqs = [ring.gen(f"t{a}") + I_UNIT * r.subs(bind, ring, cap=cap) - ring.gen(f"zeta{a}")
               for a, r in zip(range(2, n), data.rs)]
        phi = implicit_series_solve(eqs, tprime, cap) if eqs else {}
        pring = Ring.complex(["t1", *self.zetas], conj=False)
        sub = {k: v.poly for k, v in phi.items()}
        sub.update({"t1": pring.gen("t1"), **{z: pring.gen(z) for z in self.zetas}})
        rho = data.rho.subs(bind, ring, cap=cap)
        self.equation = rho.subs(sub, pring, cap=cap) - pring.gen(f"zeta{n}")
        self.exact = n == 2 and data.rho.degree() <= cap

    def at(self, target: dict) -> list[GQ]:
        vals = {z: target[z] for z in self.zetas}
        ring1 = Ring.complex(["t1"], conj=False)
        bind = {z: ring1.const(v) for z, v in vals.items()}
        bind["t1"] = ring1.gen("t1")
        return _univariate_coeffs(self.equation.subs(bind, ring1), "t1")


def preimage_count(F, target: dict | None = None, radius: GQ = DEFAULT_RADIUS,
                   trials: int = 1, seed: int = 0, k_hint: int | None = None,
                   cap: int | None = None) -> CountResult:
    """Number of solutions of ``F(t) = target`` near 0, certified; retried on FAILED."""
    rng = random.Random(seed)
    if isinstance(F, NormalFormData):
        k = k_hint or finiteness_test(F).order
        if k is INFINITE or isinstance(k, UnknownBeyond):
            return CountResult(None, FAILED, diagnostics="map is not finite")
        eq = PreimageEquation(F, cap or 2 * k + 4)
        names, solve_one = eq.zetas, lambda tgt: count_roots_in_disc(eq.at(tgt), radius)
    else:
        k = k_hint or 1
        names = F.target_names
        solve_one = lambda tgt: _count_generic(F, tgt, radius, rng)
    mag = min(DEFAULT_TARGET.re, (radius.re / 4) ** int(k))
    last = CountResult(None, FAILED, diagnostics="no trials run")
    for _ in range(max(1, trials)):
        tgt = target if target is not None else random_target(rng, names, mag)
        res = solve_one(tgt)
        res.target = tgt
        if res.status != FAILED:
            return res
        last = res
        if target is not None:
            break
    return last


def _count_generic(F: HoloMap, target: dict, radius: GQ, rng: random.Random) -> CountResult:
    """Shape-lemma count for an arbitrary polynomial map after a random linear change."""
    ring = F.ring
    names = ring.holomorphic_names()
    n = len(names)
    for _ in range(4):
        M = [[GQ(rng.randint(-3, 3)) for _ in range(n)] for _ in range(n)]
        for i in range(n):
            M[i][i] = GQ(rng.randint(4, 9))
        if det(M) == 0:
            continue
        bind = {names[i]: sum((ring.gen(names[j]) * M[i][j] for j in range(n)), ring.zero())
                for i in range(n)}
        eqs = [f.subs(bind, ring) - target[t] for f, t in zip(F.components, F.target_names)]
        try:
            gb = groebner_basis(eqs, MonomialOrder(LEX))
        except CapExceeded as exc:
            return CountResult(None, FAILED, diagnostics=str(exc))
        if is_unit_ideal(gb):
            return CountResult(0, "OK")
        if krull_dimension(leading_monomials(gb), n) != 0:
            return CountResult(None, FAILED, diagnostics="fiber is not zero-dimensional")
        last = names[-1]
        uni = [g for g in gb.generators if g.variables_used() <= {last}]
        others = _shape_generators(gb.generators, names)
        if len(uni) != 1 or others is None:
            continue  # not in shape position, try another change
        res = count_roots_in_disc(_univariate_coeffs(uni[0], last), GQ(10) ** 6)
        if res.status == FAILED:
            return res
        inside = 0
        for root in res.roots:
            y = _shape_point(others, names, root)
            x = [sum(complex(M[i][j]) * y[j] for j in range(n)) for i in range(n)]
            rr = complex(radius)
            if all(abs(c) < rr.real * 0.99 for c in x):
                inside += 1
            elif any(abs(c) > rr.real * 1.01 for c in x):
                continue
            else:
                return CountResult(None, FAILED, diagnostics="preimage near the boundary of the polydisc")
        return CountResult(inside, "OK")
    return CountResult(None, FAILED, diagnostics="no shape position found")


def _shape_generators(gens, names):
    """``x_i - g_i(x_last)`` for each non-last variable, ordered like ``names``."""
    last = names[-1]
    out = []
    for x in names[:-1]:
        unit = _unit(gens[0].ring, x)
        match = [g for g in gens if unit in g.terms and g.variables_used() <= {x, last}
                 and g.degree_in(x) == 1]
        if len(match) != 1:
            return None
        out.append(match[0])
    return out


def _unit(ring, name):
    e = [0] * ring.nvars
    e[ring.index[name]] = 1
    return tuple(e)


def _shape_point(others, names, root):
    last = names[-1]
    y = {last: root}
    for g, x in zip(others, names[:-1]):
        lc = complex(g.terms[_unit(g.ring, x)])
        rest = 0j
        for e, c in g.terms.items():
            if e == _unit(g.ring, x):
                continue
            rest += complex(c) * root ** e[g.ring.index[last]]
        y[x] = -rest / lc
    return [y[n] for n in names]


# ---------------------------------------------------------------------------
# the three-way verdict


@dataclass
class MultiplicityVerdict:
    finite: bool | None
    k_order: int | float | UnknownBeyond | None = None
    k_local_ring: int | float | str | None = None
    k_count: int | str | None = None
    count_success_rate: float | None = None
    count_trials: int = 0
    agree: bool = False
    status: str = PARTIAL
    methods: dict = field(default_factory=dict)

    def value(self):
        for k in (self.k_local_ring, self.k_order, self.k_count):
            if isinstance(k, int) or k is INFINITE:
                return k
        return None


def multiplicity(obj, method: str = ALL, seed: int = 0, trials: int = 1,
                 radius: GQ = DEFAULT_RADIUS) -> MultiplicityVerdict:
    """``mult_0(F)`` for normal-form data (all three methods) or an explicit map."""
    methods = [ORDER, LOCAL_RING, COUNT] if method == ALL else [method]
    if isinstance(obj, HoloMap):
        F, data = obj, None
        v = MultiplicityVerdict(finite=None)
    else:
        data = _as_data(obj)
        F, _ = build_resolution_map(data)
        fin = finiteness_test(data)
        v = MultiplicityVerdict(finite=fin.finite)
    if ORDER in methods and data is not None:
        v.k_order = finiteness_test(data).order
        v.methods[ORDER] = "order of rho(0, conj z1, 0)"
    if LOCAL_RING in methods:
        try:
            v.k_local_ring = local_multiplicity(F)
        except CapExceeded:
            v.k_local_ring = CAPPED
        v.methods[LOCAL_RING] = "Mora standard basis, staircase count"
        if data is None:
            v.finite = v.k_local_ring is not INFINITE and v.k_local_ring != CAPPED
    if COUNT in methods and v.finite is not False:
        k_hint = v.k_order if isinstance(v.k_order, int) else (
            v.k_local_ring if isinstance(v.k_local_ring, int) else None)
        ok = 0
        first = None
        rng = random.Random(seed)
        for _ in range(max(1, trials)):
            res = preimage_count(data if data is not None else F, radius=radius,
                                 seed=rng.randrange(2 ** 31), k_hint=k_hint)
            if res.status != FAILED:
                ok += 1
                if first is None:
                    first = res.count
                elif res.count != first:
                    first = DISAGREE
        v.count_trials = max(1, trials)
        v.count_success_rate = ok / v.count_trials
        v.k_count = first if first is not None else FAILED
        v.methods[COUNT] = "certified preimage count of a small generic target"
    ints = [k for k in (v.k_order, v.k_local_ring, v.k_count) if isinstance(k, int) and not isinstance(k, bool)]
    infs = [k for k in (v.k_order, v.k_local_ring) if k is INFINITE]
    if ints and infs:
        v.agree, v.status = False, DISAGREE
    elif ints:
        v.agree = len(set(ints)) == 1
        if not v.agree:
            v.status = DISAGREE
        elif len(ints) == len([m for m in methods if m != ORDER or data is not None]):
            v.status = CONFIRMED
        else:
            v.status = PARTIAL
    elif infs:
        v.agree = True
        v.status = CONFIRMED if len(infs) == len([m for m in methods if m != COUNT]) else PARTIAL
    return v
