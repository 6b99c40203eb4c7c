"""Gröbner bases, elimination, and local (Mora) standard bases.

Global orders use Buchberger completion with the sugar strategy.  Local
computations use Mora's tangent-cone normal form under the negative-degree
reverse lexicographic order, which is what makes ``dim O_p / I`` computable.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

from .algebra import GQ, INFINITE, AlgebraError, Polynomial, Ring

GREVLEX = "graded-revlex"
LEX = "lex"
ELIMINATION = "lex-elimination"
LOCAL = "local-negative-graded"


class CapExceeded(RuntimeError):
    """A Gröbner/standard basis computation hit a hard resource cap."""


def resource_caps() -> dict[str, int]:
    caps = {"max_basis": 20000, "max_degree": 60}
    raw = os.environ.get("CRSING_CAPS", "")
    for item in filter(None, (s.strip() for s in raw.split(","))):
        key, _, val = item.partition("=")
        key = key.strip()
        if key not in caps:
            raise ValueError(f"unknown cap {key!r} in CRSING_CAPS")
        caps[key] = int(val)
    return caps


def _grevlex(e):
    return (sum(e), tuple(-x for x in reversed(e)))


@dataclass(frozen=True)
class MonomialOrder:
    kind: str = GREVLEX
    # ELIMINATION: variable indices of the eliminated block (ranked above the rest)
    block: tuple[int, ...] = ()

    def key(self) -> Callable:
        if self.kind == GREVLEX:
            return _grevlex
        if self.kind == LEX:
            return lambda e: e
        if self.kind == LOCAL:
            return lambda e: (-sum(e), tuple(-x for x in reversed(e)))
        if self.kind == ELIMINATION:
            blk = self.block
            bset = set(blk)

            def key(e):
                first = tuple(e[i] for i in blk)
                rest = tuple(x for i, x in enumerate(e) if i not in bset)
                return (_grevlex(first), _grevlex(rest))

            return key
        raise ValueError(f"unknown monomial order {self.kind!r}")

    @property
    def is_local(self) -> bool:
        return self.kind == LOCAL


@dataclass
class Ideal:
    generators: list[Polynomial]
    order: MonomialOrder = field(default_factory=MonomialOrder)
    base_point: dict | None = None

    def __post_init__(self):
        self.generators = [g for g in self.generators if not g.is_zero()]

    @property
    def ring(self) -> Ring:
        return self.generators[0].ring

    def __iter__(self):
        return iter(self.generators)

    def __len__(self):
        return len(self.generators)


# ---------------------------------------------------------------------------
# dict-level kernels (exponent tuple -> GQ)


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _sub_exp(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _add_multiple(p: dict, q: dict, coef: GQ, shift) -> dict:
    """p - coef * x^shift * q (new dict)."""
    out = dict(p)
    for e, c in q.items():
        ne = tuple(x + y for x, y in zip(e, shift))
        v = out.get(ne)
        nv = (-(coef * c)) if v is None else v - coef * c
        if nv.is_zero():
            out.pop(ne, None)
        else:
            out[ne] = nv
    return out


def _monic(p: dict, key) -> dict:
    lm = max(p, key=key)
    inv = GQ(1) / p[lm]
    return {e: c * inv for e, c in p.items()}


class _Elem:
    __slots__ = ("poly", "lm", "lc", "sugar", "ecart")

    def __init__(self, poly, key, sugar=None):
        self.poly = poly
        self.lm = max(poly, key=key)
        self.lc = poly[self.lm]
        deg = max(sum(e) for e in poly)
        self.sugar = deg if sugar is None else sugar
        self.ecart = deg - sum(self.lm)


def _check_caps(basis_len: int, poly: dict, caps):
    if basis_len > caps["max_basis"]:
        raise CapExceeded(f"basis size exceeded {caps['max_basis']}")
    if poly and max(sum(e) for e in poly) > caps["max_degree"]:
        raise CapExceeded(f"total degree exceeded {caps['max_degree']}")


def _reduce_full(p: dict, basis: Sequence[_Elem], key) -> dict:
    rem: dict = {}
    p = dict(p)
    while p:
        lm = max(p, key=key)
        c = p[lm]
        for g in basis:
            if _divides(g.lm, lm):
                p = _add_multiple(p, g.poly, c / g.lc, _sub_exp(lm, g.lm))
                break
        else:
            rem[lm] = c
            del p[lm]
    return rem


def _spoly(f: _Elem, g: _Elem):
    lcm = _lcm(f.lm, g.lm)
    a = _add_multiple({}, f.poly, -(GQ(1) / f.lc), _sub_exp(lcm, f.lm))
    return _add_multiple(a, g.poly, GQ(1) / g.lc, _sub_exp(lcm, g.lm))


def _buchberger(polys: list[dict], key, caps) -> list[dict]:
    basis: list[_Elem] = []
    pairs: list[tuple[int, int, int]] = []

    def add(p: dict, sugar=None):
        p = _monic(p, key)
        el = _Elem(p, key, sugar)
        _check_caps(len(basis) + 1, p, caps)
        k = len(basis)
        basis.append(el)
        for i in range(k):
            if basis[i] is None:
                continue
            lcm = _lcm(basis[i].lm, el.lm)
            s = max(basis[i].sugar + sum(lcm) - sum(basis[i].lm), el.sugar + sum(lcm) - sum(el.lm))
            pairs.append((s, i, k))

    for p in polys:
        if p:
            r = _reduce_full(p, [b for b in basis if b is not None], key)
            if r:
                add(r)
    done: set[tuple[int, int]] = set()
    while pairs:
        pairs.sort(key=lambda t: (t[0], key(_lcm(basis[t[1]].lm, basis[t[2]].lm))), reverse=True)
        s, i, j = pairs.pop()
        done.add((i, j))
        fi, fj = basis[i], basis[j]
        if fi is None or fj is None:
            continue
        lcm = _lcm(fi.lm, fj.lm)
        if all(a == 0 or b == 0 for a, b in zip(fi.lm, fj.lm)):
            continue
        if _chain_skip(basis, i, j, lcm, done):
            continue
        sp = _spoly(fi, fj)
        r = _reduce_full(sp, [b for b in basis if b is not None], key)
        if r:
            add(r, s)
    return _interreduce([b.poly for b in basis if b is not None], key)


def _chain_skip(basis, i, j, lcm, done) -> bool:
    for k, g in enumerate(basis):
        if g is None or k in (i, j):
            continue
        if _divides(g.lm, lcm):
            a = (min(i, k), max(i, k))
            b = (min(j, k), max(j, k))
            if a in done and b in done:
                return True
    return False


def _interreduce(polys: list[dict], key) -> list[dict]:
    elems = [_Elem(_monic(p, key), key) for p in polys if p]
    elems.sort(key=lambda e: key(e.lm))
    minimal: list[_Elem] = []
    for e in elems:
        if not any(_divides(m.lm, e.lm) for m in minimal):
            minimal.append(e)
    out = []
    for i, e in enumerate(minimal):
        others = [m for j, m in enumerate(minimal) if j != i]
        r = _reduce_full(e.poly, others, key)
        out.append(_monic(r, key))
    out.sort(key=lambda p: key(max(p, key=key)))
    return out


# ---------------------------------------------------------------------------
# public global API


def groebner_basis(ideal: Ideal | Sequence[Polynomial], order: MonomialOrder | None = None) -> Ideal:
    if not isinstance(ideal, Ideal):
        ideal = Ideal(list(ideal), order or MonomialOrder())
    elif order is not None:
        ideal = Ideal(ideal.generators, order, ideal.base_point)
    if ideal.order.is_local:
        raise ValueError("groebner_basis needs a global order; use standard_basis")
    if not ideal.generators:
        return ideal
    ring = ideal.ring
    key = ideal.order.key()
    polys = [dict(g.terms) for g in ideal.generators]
    gb = _buchberger(polys, key, resource_caps())
    return Ideal([Polynomial(ring, p) for p in gb], ideal.order, ideal.base_point)


def normal_form(p: Polynomial, gb: Ideal) -> Polynomial:
    key = gb.order.key()
    if gb.order.is_local:
        elems = [_Elem(dict(g.terms), key) for g in gb.generators]
        return Polynomial(p.ring, _nf_mora(dict(p.terms), elems, key, resource_caps()))
    elems = [_Elem(dict(g.terms), key) for g in gb.generators]
    return Polynomial(p.ring, _reduce_full(dict(p.terms), elems, key))


def ideal_membership(p: Polynomial, ideal: Ideal, is_basis: bool = False) -> bool:
    if p.is_zero():
        return True
    if not ideal.generators:
        return False
    if ideal.order.is_local:
        basis = ideal if is_basis else standard_basis(ideal)
    else:
        basis = ideal if is_basis else groebner_basis(ideal)
    return normal_form(p.to_ring(basis.ring) if p.ring != basis.ring else p, basis).is_zero()


def is_unit_ideal(gb: Ideal) -> bool:
    return any(g.is_constant() for g in gb.generators)


def eliminate(ideal: Ideal | Sequence[Polynomial], drop: Iterable[str]) -> Ideal:
    """Generators of ``I ∩ k[remaining variables]``, in the ring without ``drop``."""
    if not isinstance(ideal, Ideal):
        ideal = Ideal(list(ideal))
    ring = ideal.ring
    drop = [d for d in drop]
    for d in drop:
        if d not in ring.index:
            raise AlgebraError(f"cannot eliminate unknown variable {d!r}")
    if not drop:
        return groebner_basis(ideal, MonomialOrder(GREVLEX))
    block = tuple(sorted(ring.index[d] for d in drop))
    gb = groebner_basis(ideal, MonomialOrder(ELIMINATION, block))
    keep = Ring([v for v in ring.variables if v.name not in set(drop)])
    dropped = set(block)
    out = []
    for g in gb.generators:
        if all(e[i] == 0 for e in g.terms for i in dropped):
            out.append(g.to_ring(keep))
    return Ideal(out, MonomialOrder(GREVLEX), ideal.base_point)


def ideals_equal(a: Sequence[Polynomial], b: Sequence[Polynomial]) -> bool:
    ga = groebner_basis(list(a))
    gb = groebner_basis(list(b))
    return all(ideal_membership(x, gb, True) for x in a) and all(ideal_membership(y, ga, True) for y in b)


# ---------------------------------------------------------------------------
# local standard bases (Mora)


def _nf_mora(h: dict, basis: Sequence[_Elem], key, caps) -> dict:
    T = list(basis)
    steps = 0
    while h:
        lm = max(h, key=key)
        cands = [g for g in T if _divides(g.lm, lm)]
        if not cands:
            return h
        g = min(cands, key=lambda x: x.ecart)
        he = _Elem(h, key)
        if g.ecart > he.ecart:
            T.append(he)
        h = _add_multiple(h, g.poly, h[lm] / g.lc, _sub_exp(lm, g.lm))
        steps += 1
        if h:
            _check_caps(len(T), h, caps)
    return h


def standard_basis(ideal: Ideal | Sequence[Polynomial]) -> Ideal:
    if not isinstance(ideal, Ideal):
        ideal = Ideal(list(ideal), MonomialOrder(LOCAL))
    order = MonomialOrder(LOCAL)
    key = order.key()
    caps = resource_caps()
    ring = ideal.ring
    basis: list[_Elem] = []
    pairs: list[tuple[int, int]] = []

    def add(p):
        p = _monic(p, key)
        basis.append(_Elem(p, key))
        _check_caps(len(basis), p, caps)
        k = len(basis) - 1
        pairs.extend((i, k) for i in range(k))

    for g in ideal.generators:
        r = _nf_mora(dict(g.terms), basis, key, caps)
        if r:
            add(r)
    while pairs:
        pairs.sort(key=lambda t: sum(_lcm(basis[t[0]].lm, basis[t[1]].lm)), reverse=True)
        i, j = pairs.pop()
        sp = _spoly(basis[i], basis[j])
        r = _nf_mora(sp, basis, key, caps)
        if r:
            add(r)
    lms = []
    kept = []
    for el in sorted(basis, key=lambda e: key(e.lm), reverse=True):
        if not any(_divides(m, el.lm) for m in lms):
            lms.append(el.lm)
            kept.append(el.poly)
    return Ideal([Polynomial(ring, p) for p in kept], order, ideal.base_point)


def leading_monomials(basis: Ideal) -> list[tuple[int, ...]]:
    key = basis.order.key()
    return [max(g.terms, key=key) for g in basis.generators]


def staircase_count(lms: Sequence[tuple[int, ...]], nvars: int):
    """Number of standard monomials, or INFINITE when not zero-dimensional."""
    if any(sum(m) == 0 for m in lms):
        return 0
    bounds = []
    for i in range(nvars):
        pure = [m[i] for m in lms if m[i] > 0 and sum(m) == m[i]]
        if not pure:
            return INFINITE
        bounds.append(min(pure))
    count = 0
    for e in itertools.product(*(range(b) for b in bounds)):
        if not any(_divides(m, e) for m in lms):
            count += 1
    return count


def krull_dimension(lms: Sequence[tuple[int, ...]], nvars: int) -> int:
    """Dimension of ``k[x]/<lms>`` (-1 for the unit ideal)."""
    if any(sum(m) == 0 for m in lms):
        return -1
    for size in range(nvars, -1, -1):
        for u in itertools.combinations(range(nvars), size):
            us = set(u)
            if not any(all(i in us for i, k in enumerate(m) if k) for m in lms):
                return size
    return 0


def local_multiplicity(F, base_point: dict | None = None):
    """``dim_C O_p / (F - F(p))`` via a Mora standard basis; INFINITE if not finite.

    ``F`` is a HoloMap-like object (``components`` in holomorphic source
    variables) or a plain sequence of polynomials.
    """
    comps = list(getattr(F, "components", F))
    if base_point is None:
        base_point = getattr(F, "base_point", None) or {}
    ring = comps[0].ring
    names = [n for n in ring.holomorphic_names() if any(n in c.variables_used() for c in comps)]
    names = names or ring.holomorphic_names()
    for c in comps:
        extra = c.variables_used() - set(ring.holomorphic_names())
        if extra:
            raise AlgebraError(f"map components must be holomorphic; found {sorted(extra)}")
    hring = Ring.complex(ring.holomorphic_names(), conj=False)
    comps = [c.to_ring(hring) for c in comps]
    if base_point:
        shift = {n: hring.gen(n) + GQ.of(base_point.get(n, 0)) for n in hring.names}
        comps = [c.subs(shift, hring) for c in comps]
    comps = [c - c.constant_term() for c in comps]
    comps = [c for c in comps if not c.is_zero()]
    if not comps:
        return INFINITE
    sb = standard_basis(Ideal(comps, MonomialOrder(LOCAL)))
    return staircase_count(leading_monomials(sb), hring.nvars)
