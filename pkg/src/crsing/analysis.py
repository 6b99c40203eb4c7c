"""Run the applicable pipeline on a manifest and assemble a JSON-ready report.

Every number in the report is wrapped as ``{"value": ..., "method": ...}``.
"""

from __future__ import annotations

import math

from gmpy2 import mpq

from . import __version__
from .algebra import GQ, INFINITE, Polynomial, UnknownBeyond
from .crlocus import GRAPH, NotGeneric, NotOnManifold, classify_point, cr_singular_locus, cr_tangent_dim
from .finiteness import (ALL, finiteness_test, multiplicity, _as_data)
from .ideals import resource_caps
from .invariants import (NotBishop, bishop_invariant, m0_equivalence_obstruction, moser_invariant,
                         surface_rho)
from .leviflat import (DIM, TheoremViolation, Undecided, dimension_obstruction, is_leviflat_graph,
                       leaf_singular_intersection, nearby_leaves_meet, push_forward_hypersurface,
                       verify_containment)
from .manifest import Manifest
from .resolution import (build_resolution_map, immersion_rank, nonextendable_candidate,
                         pullback_singular_locus, verify_parametrization)

SCHEMA_VERSION = "1.0"
THEOREM_VIOLATION = "THEOREM_VIOLATION"


def jsonable(v):
    if v is INFINITE or (isinstance(v, float) and math.isinf(v)):
        return "INFINITE"
    if isinstance(v, UnknownBeyond):
        return str(v)
    if isinstance(v, bool) or v is None or isinstance(v, (int, str)):
        return v
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (GQ, Polynomial)) or type(v).__name__ == "mpq":
        return str(v)
    if isinstance(v, dict):
        return {str(k): jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [jsonable(x) for x in v]
    return str(v)


def tag(value, method: str) -> dict:
    return {"value": jsonable(value), "method": method}


def _point(p: dict) -> dict:
    return {k: str(v) for k, v in p.items()}


def analyze(man: Manifest, method: str = ALL, degree_cap: int | None = None, seed: int | None = None,
            trials: int = 20) -> tuple[dict, int]:
    """Report and exit code (0 ok, 2 on a theorem violation)."""
    seed = man.seed if seed is None else seed
    cap = man.degree_cap if degree_cap is None else degree_cap
    M = man.manifold
    rep: dict = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "crsing", "version": __version__},
        "provenance": {"seed": seed, "degree_cap": cap, "caps": resource_caps(), "method": method,
                       "count_trials": trials},
        "manifold": {"name": M.name, "form": M.form, "n": M.n, "codim": M.d,
                     "defining_functions": [str(r) for r in M.defining_functions()]},
    }
    if man.change is not None and not man.change.is_identity():
        rep["manifold"]["harmonic_elimination"] = {"change": man.change.describe(),
                                                   "truncated_at": man.change.truncated_at,
                                                   "x_coupled_terms": man.change.x_coupled_terms}
    code = 0
    try:
        L = cr_singular_locus(M, seed=seed)
    except NotGeneric as exc:
        rep["singular_locus"] = {"error": str(exc)}
        return rep, 1
    origin = {c: GQ(0) for c in M.coords}
    rep["singular_locus"] = _locus_section(M, L, origin, seed)

    F, N = man.map, man.source
    data = man.data
    RM, RL = M, L
    if F is None and M.form == GRAPH and M.n == 2:
        # the resolution lives in the normal-form coordinates (z1, z2)
        data = _as_data(M)
        F, N = build_resolution_map(data)
        RM = data.manifold()
        RL = cr_singular_locus(RM, seed=seed)
    lf = is_leviflat_graph(M) if M.form == GRAPH and M.n == 3 else None
    if F is None and lf:
        F, N = lf.chart
    if F is not None:
        rep["resolution"] = _resolution_section(F, N, RM, RL, seed)
    if data is not None:
        rep["finiteness"] = _finiteness_section(data, method, seed, trials)
    elif F is not None:
        v = multiplicity(F, method=method, seed=seed, trials=trials)
        rep["finiteness"] = {"multiplicity": _verdict(v)}
    if M.form == GRAPH and M.n == 2:
        rep["invariants"] = _invariants_section(M, seed)
    if lf is not None or man.leviflat_assertion:
        try:
            rep["leviflat"] = _leviflat_section(man, L, lf, seed)
        except TheoremViolation as exc:
            rep["leviflat"] = {"verdict": THEOREM_VIOLATION, "detail": str(exc)}
            code = 2
    if man.hypersurfaces:
        rep["hypervarieties"] = _hyper_section(man)
    return rep, code


def _locus_section(M, L, origin, seed):
    sec = {
        "equations": [str(e) for e in L.equations],
        "intersected_with": "M",
        "real_ideal_generators": [str(g) for g in L.real_ideal_generators()],
        "dim_real_at_generic_point": tag(L.dim_real_at_generic_point,
                                         "tangent space dimension at the sampled smooth point"),
        "cr_dim_at_generic_point": tag(L.cr_dim_at_generic_point,
                                       "dim of T cap JT at the sampled point, exact linear algebra"),
        "classification": tag(L.classification, "tangent-space certificate at the sampled point"),
        "sampled_point": _point(L.sampled_point) if L.sampled_point else None,
        "caveat": L.caveat,
    }
    if M.contains(origin):
        sec["cr_tangent_dim_at_origin"] = tag(cr_tangent_dim(M, origin),
                                              "n - rank of the antiholomorphic Jacobian")
        sec["origin_in_S"] = L.contains(origin)
    if L.sampled_point:
        try:
            pc = classify_point(M, L, L.sampled_point, seed)
            sec["sampled_point_certificate"] = jsonable(pc.certificate)
        except (NotOnManifold, ValueError) as exc:
            sec["sampled_point_certificate"] = {"error": str(exc)}
    return sec


def _resolution_section(F, N, M, L, seed):
    sec = {"map": [str(c) for c in F.components], "source_kind": N.kind,
           "parametrizes_M": verify_parametrization(F, N, M),
           "jacobian": str(F.jacobian()),
           "real_jacobian_rank_at_base": tag(immersion_rank(F, N), "exact rank of d(F o t) at u = 0"),
           "real_dim_N": len(N.params.names)}
    try:
        pb = pullback_singular_locus(F, N, M, L, seed=seed)
        sec["pullback"] = {"ok": pb.ok, "singular_samples": len(pb.singular_samples),
                           "regular_samples": len(pb.regular_samples), "failures": pb.failures,
                           "method": "exact point checks of F({J_F = 0} cap N) in S and complement in M minus S"}
        cand = nonextendable_candidate(F, N, M, L, seed=seed)
        sec["candidate"] = {"phi": "J_F^2 o f^-1", "theta_squared": str(cand.phi), "ok": cand.ok,
                            "cr_checks": tag(len(cand.checked_points), "exact L(phi) = 0 at sampled CR points"),
                            "cr_dimension": cand.cr_dimension, "vanishes_on_S": cand.vanishes_on_s,
                            "s_checks": tag(len(cand.s_points), "exact phi = 0 at sampled points of S"),
                            "failures": cand.failures}
    except NotGeneric as exc:
        sec["pullback"] = {"error": str(exc)}
    return sec


def _verdict(v):
    out = {"finite": v.finite, "status": v.status, "agree": v.agree}
    names = {"order": ("k_order", "order of vanishing of rho(0, conj z1, 0)"),
             "local_ring": ("k_local_ring", "Mora standard basis staircase count"),
             "count": ("k_count", "certified preimage count (Weierstrass inclusion discs)")}
    for key, (attr, meth) in names.items():
        if key in v.methods:
            out[attr] = tag(getattr(v, attr), meth)
    if v.count_success_rate is not None:
        out["count_success_rate"] = tag(v.count_success_rate, f"fraction of {v.count_trials} seeded trials")
    return out


def _finiteness_section(data, method, seed, trials):
    fin = finiteness_test(data)
    sec = {"finite": fin.finite, "witness": str(fin.witness),
           "order": tag(fin.order, "order of rho(0, conj z1, 0)")}
    sec["multiplicity"] = _verdict(multiplicity(data, method=method, seed=seed, trials=trials))
    return sec


def _invariants_section(M, seed):
    rho = surface_rho(M)
    sec = {"m0_obstruction": m0_equivalence_obstruction(rho)}
    try:
        bd = bishop_invariant(rho)
    except NotBishop as exc:
        sec["bishop"] = {"error": str(exc)}
        return sec
    sec["bishop"] = {"gamma": tag(bd.gamma_str(), "|c|/|b| from the quadratic part"),
                     "gamma_squared": tag(bd.gamma_squared, "exact"),
                     "symmetric_quadratic": str(bd.symmetric_quadratic),
                     "normal_quadratic": str(bd.normal_quadratic) if bd.normal_quadratic is not None else None,
                     "change_record": bd.change_record}
    if not bd.infinite and bd.gamma_squared == 0:
        s, _ = moser_invariant(rho, seed=seed)
        sec["moser"] = tag(s, "multiplicity of the resolution map")
    return sec


def _leviflat_section(man, L, lf, seed):
    M = man.manifold
    sec: dict = {}
    if lf is not None:
        sec["verdict"] = lf.verdict
        sec["reason"] = lf.reason
    if lf:
        fam = lf.leaves
        ts = [GQ(0), GQ(1), GQ(0, 1), GQ(1, 2), GQ(mpq(-1, 2), mpq(3, 2))]
        leaves = []
        center = None
        for t in ts:
            try:
                res = leaf_singular_intersection(L, fam, t, seed)
            except Undecided as exc:
                leaves.append({"t": str(t), "verdict": "UNDECIDED", "detail": str(exc)})
                continue
            leaves.append({"t": str(t), "verdict": res.verdict, "certificate": jsonable(res.certificate)})
            if res.verdict == DIM(fam.j - 1) and center is None:
                center = t
        sec["leaf_dimension_j"] = fam.j
        sec["leaf_intersections"] = leaves
        if center is not None:
            chk = nearby_leaves_meet(L, fam, center, seed)
            sec["nearby_leaves"] = {"center": str(center), "grid": "5x5, half-width 1/2",
                                    "all_meet_S": chk.all_meet}
    if lf or man.leviflat_assertion:
        ob = dimension_obstruction(M, L, man.leviflat_assertion, seed)
        sec["dimension_obstruction"] = {"verdict": ob.verdict,
                                        "dim_S": tag(ob.dim_s, "tangent dimension at sampled point of S"),
                                        "bound": tag(ob.bound, "2(n - d)"),
                                        "leviflat_basis": ob.leviflat_basis}
    return sec


def _hyper_section(man):
    M = man.manifold
    out = []
    if man.map is None:
        ok = verify_containment(man.hypersurfaces, M)
        return [{"polynomial": str(h), "contains_M": c, "method": "substitution / ideal membership"}
                for h, c in zip(man.hypersurfaces, ok)]
    for h in man.hypersurfaces:
        hv = push_forward_hypersurface(man.map, h)
        out.append({"source_hypersurface": str(h), "polynomial": str(hv.polynomial),
                    "degree": hv.polynomial.degree(), "flag": hv.flag,
                    "contains_M": verify_containment([hv.polynomial], M)[0],
                    "method": "elimination over the complexified graph of (F, conj F), restricted to the diagonal"})
    return out


def render_text(rep: dict, indent: int = 0) -> str:
    lines = []
    pad = "  " * indent
    for k, v in rep.items():
        if isinstance(v, dict) and set(v) == {"value", "method"}:
            lines.append(f"{pad}{k}: {v['value']}  [{v['method']}]")
        elif isinstance(v, dict):
            lines.append(f"{pad}{k}:")
            lines.append(render_text(v, indent + 1))
        elif isinstance(v, list) and v and isinstance(v[0], dict):
            lines.append(f"{pad}{k}:")
            for item in v:
                lines.append(render_text(item, indent + 1))
                lines.append(f"{pad}  -")
        else:
            lines.append(f"{pad}{k}: {v}")
    return "\n".join(x for x in lines if x)
