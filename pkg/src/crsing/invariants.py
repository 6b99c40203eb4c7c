"""Bishop and Moser invariants of CR singular surfaces ``w = rho(z, conj z)`` in C^2."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import gmpy2
from gmpy2 import mpq

from .algebra import (GQ, INFINITE, AlgebraError, ParseError, Polynomial, Ring, TruncatedSeries, parse)
from .crlocus import GRAPH, ManifoldSpec
from .finiteness import (finiteness_test,
                         implicit_series_solve, multiplicity)
from .ideals import local_multiplicity
from .resolution import NormalFormData, build_resolution_map
from .sampling import random_rational

OBSTRUCTED = "OBSTRUCTED"
NOT_OBSTRUCTED_UP_TO_CAP = "NOT_OBSTRUCTED_UP_TO_CAP"


class NotBishop(ValueError):
    pass


def surface_rho(obj) -> Polynomial:
    """``rho`` in the ring ``(z1, conj z1)`` from a string, graph spec or polynomial."""
    ring = NormalFormData.make_ring(2)
    if isinstance(obj, str):
        try:
            return parse(obj, ring)
        except ParseError:
            obj = parse(obj, Ring.complex(["z"]))
    if isinstance(obj, ManifoldSpec):
        if obj.form != GRAPH or obj.n != 2:
            raise AlgebraError("expected a graph surface in C^2")
        z = obj.zs[0]
        return obj.rho.subs({z: ring.gen("z1"), f"conj({z})": ring.gen("conj(z1)")}, ring)
    if isinstance(obj, Polynomial):
        names = obj.ring.holomorphic_names()
        if len(names) != 1:
            raise AlgebraError("expected a polynomial in one complex variable")
        z = names[0]
        return obj.subs({z: ring.gen("z1"), f"conj({z})": ring.gen("conj(z1)")}, ring)
    raise AlgebraError(f"cannot read a surface from {type(obj).__name__}")


@dataclass
class BishopData:
    gamma_squared: mpq | None
    infinite: bool
    quadratic: tuple[GQ, GQ, GQ]
    symmetric_quadratic: Polynomial
    normal_quadratic: Polynomial | None
    change_record: list[str] = field(default_factory=list)

    @property
    def gamma(self):
        """Exact gamma when it is rational, else None (use ``gamma_squared``)."""
        if self.infinite:
            return INFINITE
        num, den = self.gamma_squared.numerator, self.gamma_squared.denominator
        if gmpy2.is_square(num) and gmpy2.is_square(den):
            return mpq(gmpy2.isqrt(num), gmpy2.isqrt(den))
        return None

    def gamma_str(self) -> str:
        if self.infinite:
            return "INFINITE"
        g = self.gamma
        return str(g) if g is not None else f"sqrt({self.gamma_squared})"


def bishop_invariant(obj) -> BishopData:
    """Bishop invariant from the quadratic part ``a z^2 + b z conj z + c conj(z)^2``."""
    rho = surface_rho(obj)
    ring = rho.ring
    z, zb = ring.gen("z1"), ring.gen("conj(z1)")
    if not rho.constant_term().is_zero() or not rho.homogeneous_part(1).is_zero():
        raise NotBishop("rho must vanish to order 2 at the origin")
    q = rho.homogeneous_part(2)
    a = q.terms.get(_exp(ring, 2, 0), GQ(0))
    b = q.terms.get(_exp(ring, 1, 1), GQ(0))
    c = q.terms.get(_exp(ring, 0, 2), GQ(0))
    if b.is_zero() and c.is_zero():
        raise NotBishop("quadratic part is holomorphic (or zero): not a Bishop surface")
    rec = []
    if not a.is_zero():
        rec.append(f"w -> w - ({a})*z^2")
    if b.is_zero():
        sym = zb * zb + z * z
        rec.append(f"w -> (w + ({c.conj()})*z^2)/({c}) up to rotation of z")
        return BishopData(None, True, (a, b, c), sym, sym, rec)
    ratio = c / b
    if b != GQ(1):
        rec.append(f"w -> w/({b})")
    sym = z * zb + z * z * ratio.conj() + zb * zb * ratio
    if not ratio.is_zero():
        rec.append(f"w -> w + ({ratio.conj()})*z^2")
    g2 = ratio.abs2()
    data = BishopData(g2, False, (a, b, c), sym, None, rec)
    g = data.gamma
    if g is not None:
        data.normal_quadratic = z * zb + (z * z + zb * zb) * GQ(g)
        if g != 0:
            rec.append(f"z -> e^(i theta) z with e^(2 i theta) = ({ratio})/({g})")
    return data


def _exp(ring, i, j):
    e = [0] * ring.nvars
    e[ring.index["z1"]] = i
    e[ring.index["conj(z1)"]] = j
    return tuple(e)


def moser_invariant(obj, seed: int = 0, trials: int = 1):
    """Moser invariant ``s = mult_0(F)`` for a surface with vanishing Bishop invariant."""
    if isinstance(obj, TruncatedSeries):
        res = finiteness_test(obj)
        if res.finite is None:
            return res.order
        rho = obj.poly
    else:
        rho = surface_rho(obj)
    bd = bishop_invariant(rho)
    if bd.infinite or bd.gamma_squared != 0:
        raise AlgebraError(f"Bishop invariant is {bd.gamma_str()}, not 0")
    data = NormalFormData(2, rho, [])
    v = multiplicity(data, seed=seed, trials=trials)
    return v.value(), v


def m0_equivalence_obstruction(obj, degree_cap: int | None = None) -> str:
    """OBSTRUCTED iff ``rho(0, conj z)`` is not identically zero (up to the cap)."""
    rho = obj.poly if isinstance(obj, TruncatedSeries) else surface_rho(obj)
    if degree_cap is not None:
        rho = rho.truncate(degree_cap)
    res = finiteness_test(NormalFormData(2, rho, []))
    return OBSTRUCTED if res.finite else NOT_OBSTRUCTED_UP_TO_CAP


# ---------------------------------------------------------------------------
# invariance under random holomorphic changes


@dataclass
class ProbeTrial:
    change: dict
    rho: Polynomial
    flag: bool
    mult: int | float


@dataclass
class ProbeReport:
    base_flag: bool
    base_mult: int | float
    trials: list[ProbeTrial]
    cap: int
    seed: int

    @property
    def stable(self) -> bool:
        return all(t.flag == self.base_flag and t.mult == self.base_mult for t in self.trials)


def _gq(rng, scale=3, nonzero=False):
    return GQ(random_rational(rng, scale, nonzero), random_rational(rng, scale, False))


def random_change(rng: random.Random) -> dict:
    """``Z = a z + b w + q1``, ``W = mu w + nu z^2 + q2`` with ``a, mu != 0``."""
    R = Ring.complex(["z", "w"], conj=False)
    z, w = R.gens()
    quad = [z * z, z * w, w * w]
    rest = [z ** 3, z * z * w, z * w]
    q1 = sum((m * _gq(rng) for m in quad), R.zero())
    q2 = sum((m * _gq(rng) for m in rest), R.zero())
    return {"a": _gq(rng, nonzero=True), "b": _gq(rng), "mu": _gq(rng, nonzero=True),
            "nu": _gq(rng), "q1": q1, "q2": q2}


def transform_surface(rho: Polynomial, change: dict, cap: int) -> Polynomial:
    """Graph function of the image of ``w = rho`` under ``change``, to degree ``cap``."""
    S = Ring.complex(["z", "zb", "Z", "Zb"], conj=False)
    z, zb, Z, Zb = S.gens()
    to_s = {"z1": z, "conj(z1)": zb}
    r = rho.subs(to_s, S)
    rb = rho.conj().subs(to_s, S)
    q1, q2 = change["q1"], change["q2"]
    q1b = Polynomial(q1.ring, {e: c.conj() for e, c in q1.terms.items()})
    g1 = z * change["a"] + r * change["b"] + q1.subs({"z": z, "w": r}, S, cap=cap) - Z
    g2 = zb * change["a"].conj() + rb * change["b"].conj() + q1b.subs({"z": zb, "w": rb}, S, cap=cap) - Zb
    psi = implicit_series_solve([g1, g2], ["z", "zb"], cap)
    P = psi["z"].poly.ring
    back = {"z": psi["z"].poly, "zb": psi["zb"].poly, "Z": P.gen("Z"), "Zb": P.gen("Zb")}
    r_psi = r.subs(back, P, cap=cap)
    new = r_psi * change["mu"] + (back["z"].mul_truncated(back["z"], cap)) * change["nu"] \
        + q2.subs({"z": back["z"], "w": r_psi}, P, cap=cap)
    out_ring = NormalFormData.make_ring(2)
    return new.truncate(cap).subs({"Z": out_ring.gen("z1"), "Zb": out_ring.gen("conj(z1)")}, out_ring)


def invariance_probe(obj, seed: int = 0, trials: int = 20, degree_cap: int = 8) -> ProbeReport:
    """Flag ``rho(0, conj z) == 0`` and local multiplicity before and after random changes."""
    rho = surface_rho(obj)
    base = NormalFormData(2, rho, [])
    F, _ = build_resolution_map(base)
    rep = ProbeReport(not finiteness_test(base).finite, local_multiplicity(F), [], degree_cap, seed)
    rng = random.Random(seed)
    for _ in range(trials):
        ch = random_change(rng)
        new = transform_surface(rho, ch, degree_cap)
        data = NormalFormData(2, new, [])
        F2, _ = build_resolution_map(data)
        rep.trials.append(ProbeTrial({k: str(v) for k, v in ch.items()}, new,
                                     not finiteness_test(data).finite, local_multiplicity(F2)))
    return rep
