"""Command-line interface: ``crsing <command> ...``."""

from __future__ import annotations

import argparse
import json
import sys

from gmpy2 import mpq

from .algebra import GQ, AlgebraError
from .analysis import THEOREM_VIOLATION, analyze, jsonable, render_text, tag
from .crlocus import NotGeneric, cr_singular_locus
from .ideals import CapExceeded
from .invariants import (NotBishop, bishop_invariant, invariance_probe, m0_equivalence_obstruction,
                         moser_invariant, surface_rho)
from .leviflat import (TheoremViolation, Undecided, dimension_obstruction, is_leviflat_graph,
                       leaf_singular_intersection, orbit_hypersurface, push_forward_hypersurface,
                       verify_containment)
from .manifest import ManifestError, load_manifest

EXIT_OK, EXIT_INPUT, EXIT_VIOLATION = 0, 1, 2


def _emit(obj: dict, fmt: str, out) -> None:
    if fmt == "text":
        out.write(render_text(obj) + "\n")
    else:
        out.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _common(p):
    p.add_argument("file", help="manifest (INI)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--degree-cap", type=int, default=None)
    p.add_argument("--report", choices=["json", "text"], default="json")
    p.add_argument("-o", "--output", help="write the report here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="crsing", description="Exact analysis of CR singular submanifolds.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="full pipeline on a manifest")
    _common(p)
    p.add_argument("--method", choices=["order", "local-ring", "count", "all"], default="all")
    p.add_argument("--trials", type=int, default=20, help="preimage-count trials")

    p = sub.add_parser("fixtures", help="run the built-in corpus")
    p.add_argument("--filter", default=None)
    p.add_argument("--report", choices=["json", "text"], default="text")

    for name, hlp in [("bishop", "Bishop invariant of a surface"), ("moser", "Moser invariant of a surface"),
                      ("leviflat", "Levi-flat recognition and dimension obstruction")]:
        _common(sub.add_parser(name, help=hlp))

    p = sub.add_parser("probe", help="invariance under random holomorphic changes")
    _common(p)
    p.add_argument("--trials", type=int, default=20)

    p = sub.add_parser("leaves", help="leaf / singular-set intersections")
    _common(p)
    p.add_argument("--t", action="append", default=None,
                   help="leaf parameter as re,im (repeatable); default: a small fixed set")

    p = sub.add_parser("hypervarieties", help="push forward source hypersurfaces")
    _common(p)
    p.add_argument("--directions", default=None,
                   help="orbit directions, e.g. 'w1=1,w2=0; w1=0,w2=1' (Im<w'', v> = 0)")
    return ap


def _rational(s: str):
    return mpq(s.strip())


def _cmd_analyze(args, man):
    method = args.method.replace("-", "_")
    rep, code = analyze(man, method=method, degree_cap=args.degree_cap, seed=args.seed, trials=args.trials)
    return rep, code


def _cmd_bishop(args, man):
    bd = bishop_invariant(surface_rho(man.manifold))
    return {"gamma": tag(bd.gamma_str(), "|c|/|b| from the quadratic part"),
            "gamma_squared": tag(bd.gamma_squared, "exact"),
            "symmetric_quadratic": str(bd.symmetric_quadratic),
            "normal_quadratic": str(bd.normal_quadratic) if bd.normal_quadratic is not None else None,
            "change_record": bd.change_record}, EXIT_OK


def _cmd_moser(args, man):
    s, v = moser_invariant(surface_rho(man.manifold), seed=args.seed or 0)
    return {"moser": tag(s, "multiplicity of the resolution map"), "status": v.status,
            "obstruction": m0_equivalence_obstruction(surface_rho(man.manifold))}, EXIT_OK


def _cmd_probe(args, man):
    rep = invariance_probe(man.manifold, seed=args.seed or 0, trials=args.trials,
                           degree_cap=args.degree_cap or 8)
    return {"base_flag_rho0_zero": rep.base_flag,
            "base_mult": tag(rep.base_mult, "local ring"),
            "stable": rep.stable, "degree_cap": rep.cap, "seed": rep.seed,
            "trials": [{"flag": t.flag, "mult": jsonable(t.mult), "change": t.change} for t in rep.trials]
            }, EXIT_OK


def _cmd_leviflat(args, man):
    M = man.manifold
    lf = is_leviflat_graph(M)
    out = {"verdict": lf.verdict, "reason": lf.reason}
    if lf or man.leviflat_assertion:
        ob = dimension_obstruction(M, leviflat_assertion=man.leviflat_assertion, seed=args.seed or 0)
        out["dimension_obstruction"] = {"verdict": ob.verdict, "dim_S": tag(ob.dim_s, "sampled tangent dimension"),
                                        "bound": tag(ob.bound, "2(n - d)"), "leviflat_basis": ob.leviflat_basis}
    return out, EXIT_OK


def _cmd_leaves(args, man):
    M = man.manifold
    lf = is_leviflat_graph(M)
    if not lf:
        raise AlgebraError(f"no leaf family: {lf.reason}")
    S = cr_singular_locus(M, seed=args.seed or 0)
    ts = [GQ(*(_rational(x) for x in t.split(","))) for t in args.t] if args.t else \
        [GQ(0), GQ(1), GQ(0, 1), GQ(1, 2)]
    rows = []
    for t in ts:
        try:
            r = leaf_singular_intersection(S, lf.leaves, t, args.seed or 0)
            rows.append({"t": str(t), "verdict": r.verdict, "certificate": jsonable(r.certificate)})
        except Undecided as exc:
            rows.append({"t": str(t), "verdict": "UNDECIDED", "detail": str(exc)})
    return {"leaf_dimension_j": lf.leaves.j, "leaves": rows}, EXIT_OK


def _parse_directions(s: str):
    out = []
    for block in s.split(";"):
        pairs = [x.split("=") for x in block.split(",") if x.strip()]
        out.append(([k.strip() for k, _ in pairs], [_rational(v) for _, v in pairs]))
    return out


def _cmd_hyper(args, man):
    F = man.map
    hs = list(man.hypersurfaces)
    if args.directions:
        if F is None:
            raise AlgebraError("--directions needs a [map] section")
        for names, v in _parse_directions(args.directions):
            hs.append(orbit_hypersurface(F.source_names, names, v))
    if not hs:
        raise AlgebraError("no hypersurfaces given (use [options] hypersurfaces or --directions)")
    rows = []
    if F is None:
        for h, ok in zip(hs, verify_containment(hs, man.manifold)):
            rows.append({"polynomial": str(h), "contains_M": ok})
    else:
        for h in hs:
            hv = push_forward_hypersurface(F, h)
            rows.append({"source_hypersurface": str(h), "polynomial": str(hv.polynomial), "flag": hv.flag,
                         "contains_M": verify_containment([hv.polynomial], man.manifold)[0]})
    return {"hypervarieties": rows}, EXIT_OK


COMMANDS = {"analyze": _cmd_analyze, "bishop": _cmd_bishop, "moser": _cmd_moser, "probe": _cmd_probe,
            "leviflat": _cmd_leviflat, "leaves": _cmd_leaves, "hypervarieties": _cmd_hyper}


def _cmd_fixtures(args) -> int:
    from .fixtures import run_fixtures

    rows = run_fixtures(args.filter)
    if args.report == "json":
        _emit({"rows": [r.__dict__ for r in rows], "passed": all(r.ok for r in rows)}, "json", sys.stdout)
    else:
        w = max((len(r.fixture) for r in rows), default=7)
        c = max((len(r.check) for r in rows), default=5)
        print(f"{'fixture':<{w}}  {'check':<{c}}  result  expected / got")
        for r in rows:
            print(f"{r.fixture:<{w}}  {r.check:<{c}}  {'PASS' if r.ok else 'FAIL':<6}  {r.expected} / {r.got}")
        print(f"{sum(r.ok for r in rows)}/{len(rows)} checks passed")
    return EXIT_OK if rows and all(r.ok for r in rows) else EXIT_INPUT


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "fixtures":
        return _cmd_fixtures(args)
    try:
        man = load_manifest(args.file)
        rep, code = COMMANDS[args.command](args, man)
    except (ManifestError, AlgebraError, NotBishop, NotGeneric, ValueError) as exc:
        print(f"crsing: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CapExceeded as exc:
        print(f"crsing: resource cap exceeded: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except TheoremViolation as exc:
        print(f"crsing: {THEOREM_VIOLATION}: {exc}", file=sys.stderr)
        return EXIT_VIOLATION
    if args.output:
        with open(args.output, "w") as fh:
            _emit(rep, args.report, fh)
    else:
        _emit(rep, args.report, sys.stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
