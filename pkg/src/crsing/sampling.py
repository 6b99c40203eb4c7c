"""Exact rational sample points on real algebraic sets.

A point is found by fixing all but ``m`` real coordinates at random rationals
and solving for the rest when the sliced system has a unique rational
solution (linear Gröbner basis) or rational roots found by eliminating down
to one unknown and back-substituting.  A
sample is kept only if the real Jacobian there has rank ``m``, which
certifies a smooth point of local dimension ``N - m``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

import sympy
from gmpy2 import mpq

from .algebra import ANTIHOLOMORPHIC, GQ, HOLOMORPHIC, REAL, Polynomial, Ring
from .ideals import eliminate, groebner_basis, is_unit_ideal
from .linalg import rank


def real_chart(ring: Ring) -> tuple[Ring, dict[str, Polynomial]]:
    """Real coordinates ``x_z, y_z`` for each holomorphic ``z`` (real vars kept)."""
    names = []
    for v in ring.variables:
        if v.role == HOLOMORPHIC:
            names += [f"x_{v.name}", f"y_{v.name}"]
        elif v.role == REAL:
            names.append(v.name)
    rring = Ring.real(names)
    bind = {}
    for v in ring.variables:
        if v.role == HOLOMORPHIC:
            x, y = rring.gen(f"x_{v.name}"), rring.gen(f"y_{v.name}")
            bind[v.name] = x + y * GQ(0, 1)
            if v.pair in ring.index:
                bind[v.pair] = x - y * GQ(0, 1)
        elif v.role == REAL:
            bind[v.name] = rring.gen(v.name)
    for v in ring.variables:
        if v.role == ANTIHOLOMORPHIC and v.name not in bind:
            raise ValueError(f"antiholomorphic {v.name} lacks a holomorphic partner")
    return rring, bind


def realify(polys, ring: Ring | None = None) -> tuple[Ring, list[Polynomial]]:
    """Real and imaginary parts (rational coefficients) in a real chart."""
    polys = list(polys)
    ring = ring or polys[0].ring
    rring, bind = real_chart(ring)
    out: list[Polynomial] = []
    seen = set()
    for p in polys:
        q = p.subs(bind, rring) if ring.nvars else p
        for part in (q.real_part(), q.imag_part()):
            if part.is_zero():
                continue
            part = _primitive(part)
            if part not in seen:
                seen.add(part)
                out.append(part)
    return rring, out


def _primitive(p: Polynomial) -> Polynomial:
    lead = p.sorted_terms()[0][1]
    return p / lead


def to_complex_point(ring: Ring, real_values: dict) -> dict[str, GQ]:
    pt = {}
    for v in ring.variables:
        if v.role == HOLOMORPHIC:
            pt[v.name] = GQ(real_values[f"x_{v.name}"], real_values[f"y_{v.name}"])
        elif v.role == REAL:
            pt[v.name] = GQ(real_values[v.name])
    return pt


def jacobian_rank(polys, rring: Ring, values: dict) -> int:
    pt = {n: GQ(values[n]) for n in rring.names}
    rows = [[p.diff(n).evaluate(pt) for n in rring.names] for p in polys]
    return rank(rows) if rows else 0


@dataclass
class Sample:
    values: dict  # real coordinate name -> mpq
    solved: tuple[str, ...]
    rank: int
    dim: int


def random_rational(rng: random.Random, scale: int = 3, nonzero: bool = True) -> mpq:
    while True:
        v = mpq(rng.randint(-4 * scale, 4 * scale), rng.randint(1, scale))
        if v != 0 or not nonzero:
            return v


def _solve_slice(polys, rring, unknowns, fixed):
    sub_ring = Ring.real(unknowns)
    bind = {n: sub_ring.gen(n) for n in unknowns}
    bind.update({n: sub_ring.const(GQ(v)) for n, v in fixed.items()})
    sliced = [p.subs(bind, sub_ring) for p in polys]
    sliced = [s for s in sliced if not s.is_zero()]
    if not sliced:
        return []
    if any(s.is_constant() for s in sliced):
        return []
    gb = groebner_basis(sliced)
    if is_unit_ideal(gb):
        return []
    gens = gb.generators
    if len(gens) == len(unknowns) and all(g.degree() == 1 for g in gens):
        sol = {}
        for g in gens:
            # reduced linear basis: each generator is x_k - c
            lin = [n for n in unknowns if g.degree_in(n) == 1]
            if len(lin) != 1:
                return []
            n = lin[0]
            c = g.constant_term() / g.diff(n).constant_term()
            if not c.is_real():
                return []
            sol[n] = -c.re
        return [sol]
    return _rational_solutions(gens, sub_ring, list(unknowns))


def _rational_solutions(polys, ring, unknowns, limit: int = 8):
    """Rational real solutions of a zero-dimensional system by back-substitution."""
    n = unknowns[-1]
    if len(unknowns) == 1:
        uni = polys
    else:
        uni = eliminate(polys, unknowns[:-1]).generators
    uni = [g for g in uni if not g.is_zero()]
    if not uni:
        return []
    one = Ring.real([n])
    base = min((g.to_ring(one) for g in uni), key=lambda g: g.degree())
    out = []
    for r in _rational_roots(base, n):
        if len(unknowns) == 1:
            if all(g.evaluate({n: GQ(r)}).is_zero() for g in polys):
                out.append({n: r})
            continue
        rest = Ring.real(unknowns[:-1])
        bind = {u: rest.gen(u) for u in unknowns[:-1]}
        bind[n] = rest.const(GQ(r))
        sub = [q for q in (g.subs(bind, rest) for g in polys) if not q.is_zero()]
        if any(q.is_constant() for q in sub):
            continue
        if not sub:
            continue
        gb = groebner_basis(sub)
        if is_unit_ideal(gb):
            continue
        for sol in _rational_solutions(gb.generators, rest, unknowns[:-1], limit):
            out.append({**sol, n: r})
        if len(out) >= limit:
            break
    return out


def _rational_roots(p: Polynomial, name: str) -> list[mpq]:
    x = sympy.Symbol("x")
    coeffs = {}
    for e, c in p.terms.items():
        if not c.is_real():
            return []
        coeffs[sum(e)] = sympy.Rational(int(c.re.numerator), int(c.re.denominator))
    expr = sum(c * x ** k for k, c in coeffs.items())
    roots = []
    for fac, _ in sympy.factor_list(expr, x)[1]:
        poly = sympy.Poly(fac, x)
        if poly.degree() == 1:
            a, b = poly.all_coeffs()
            r = -b / a
            roots.append(mpq(int(r.p), int(r.q)))
    return sorted(set(roots))


def sample_points(polys, rring: Ring, rng: random.Random, count: int = 1,
                  tries: int = 3, accept=None, max_attempts: int = 4000) -> list[Sample]:
    """Up to ``count`` smooth rational points of the real zero set of ``polys``."""
    names = list(rring.names)
    N = len(names)
    out: list[Sample] = []
    if not polys:
        while len(out) < count:
            vals = {n: random_rational(rng) for n in names}
            if accept is None or accept(vals):
                out.append(Sample(vals, (), 0, N))
        return out
    attempts = 0
    for m in range(1, N + 1):
        subsets = list(itertools.combinations(names, m))
        rng.shuffle(subsets)
        for unknowns in subsets:
            for _ in range(tries):
                attempts += 1
                if attempts > max_attempts:
                    return out
                fixed = {n: random_rational(rng) for n in names if n not in unknowns}
                for sol in _solve_slice(polys, rring, list(unknowns), fixed):
                    vals = {**fixed, **sol}
                    r = jacobian_rank(polys, rring, vals)
                    if r != m:
                        continue
                    if accept is not None and not accept(vals):
                        continue
                    out.append(Sample(vals, tuple(unknowns), r, N - r))
                    if len(out) >= count:
                        return out
    return out
