"""Built-in fixture corpus with expected outcomes for ``crsing fixtures``."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .algebra import GQ, INFINITE, parse
from .crlocus import cr_singular_locus, same_real_locus
from .leviflat import NOT_A_CR_SINGULAR_IMAGE, CONSISTENT
from .manifest import parse_manifest


@dataclass
class Fixture:
    name: str
    tags: tuple[str, ...]
    manifest: str
    expect: dict = field(default_factory=dict)

    def load(self):
        return parse_manifest(self.manifest, self.name)


def _graph(name, coords, rho, extra=""):
    return f"[manifold]\nname = {name}\nform = graph\ncoords = {coords}\ngraph_var = w\nrho = {rho}\n{extra}"


def _not_an_image(n):
    zs = [f"z{k}" for k in range(1, n)]
    rho = " + ".join(f"({z}^2 + conj({z})^2)/2" for z in zs)
    extra = ("[options]\nleviflat_assertion = intersection of the Levi-flat hypersurfaces "
             f"Im w = 0 and Re w = Re(sum z_k^2)\n"
             f"hypersurfaces = (w - conj(w))/(2*I); (w + conj(w))/2 - ({rho})\n")
    return Fixture(f"non-image-{n}", ("non-image", "leviflat", "obstruction"),
                   _graph(f"non-image-{n}", ", ".join(zs), rho, extra),
                   {"S": [*zs, *[f"conj({z})" for z in zs], "w", "conj(w)"],
                    "obstruction": NOT_A_CR_SINGULAR_IMAGE})


DOUBLE_COVER_MANIFEST = """[manifold]
name = double-cover
form = graph
coords = z1, z2
graph_var = w
rho = (conj(z2) + I*z1*conj(z1) + (z1*conj(z1))^2)^2

[map]
source = z, w1, w2
target = z1, z2, w
components = z; w1 + I*w2; (w1 - I*w2)^2
source_kind = parametrized
params = a, b, s1, s2
param_z = a + I*b
param_w1 = s1 + I*(a^2 + b^2)/2
param_w2 = s2 + I*(a^2 + b^2)^2/2

[options]
hypersurfaces = (w1 - conj(w1))/(2*I) - z*conj(z)/2; (w2 - conj(w2))/(2*I) - (z*conj(z))^2/2
"""


def _surface(name, rho, tags, expect):
    return Fixture(name, tags, _graph(name, "z", rho), expect)


FIXTURES: list[Fixture] = [
    Fixture("leviflat-bishop3", ("leviflat-example", "leviflat"), _graph("leviflat-bishop3", "z1, z2", "z2*conj(z2) + conj(z2)^2/2"),
            {"S": ["z2 + conj(z2)"], "classification": "Levi-flat", "dim_S": 3, "obstruction": CONSISTENT}),
    Fixture("leviflat-union", ("leviflat-example", "leviflat"), _graph("leviflat-union", "z1, z2", "z1*conj(z2)^2"),
            {"S": ["z1*z2", "z1*conj(z2)", "conj(z1)*z2", "conj(z1)*conj(z2)"], "classification": "complex",
             "dim_S": 2, "obstruction": CONSISTENT}),
    Fixture("leviflat-totally-real", ("leviflat-example", "leviflat"),
            _graph("leviflat-totally-real", "z1, z2", "z1*conj(z2) - conj(z2)^2/2"),
            {"S": ["z1 - conj(z2)"], "classification": "totally-real", "dim_S": 2, "obstruction": CONSISTENT}),
    Fixture("leviflat-cr-singular", ("leviflat-example", "leviflat"),
            _graph("leviflat-cr-singular", "z1, z2", "z1*conj(z2) - z2*conj(z2)^2/2"),
            {"S": ["z1 - z2*conj(z2)"], "classification": "totally-real", "origin": "CR-singular",
             "dim_S": 2, "obstruction": CONSISTENT}),
    _not_an_image(3),
    _not_an_image(4),
    Fixture("double-cover", ("double-cover", "image"), DOUBLE_COVER_MANIFEST, {"mult": 2, "jacobian": "-4*I*w1 - 4*w2"}),
    _surface("m0", "z*conj(z)", ("m0", "surface"), {"mult": INFINITE, "finite": False}),
    _surface("bishop-1/2", "z*conj(z) + (z^2 + conj(z)^2)/2", ("bishop", "surface"), {"mult": 2, "gamma": "1/2"}),
    _surface("bishop-1", "z*conj(z) + (z^2 + conj(z)^2)", ("bishop", "surface"), {"mult": 2, "gamma": "1"}),
    _surface("bishop-2", "z*conj(z) + 2*(z^2 + conj(z)^2)", ("bishop", "surface"), {"mult": 2, "gamma": "2"}),
    _surface("moser-3", "z*conj(z) + z^3 + conj(z)^3", ("moser", "bishop", "surface"), {"mult": 3, "gamma": "0"}),
    _surface("moser-4", "z*conj(z) + z^4 + conj(z)^4", ("moser", "bishop", "surface"), {"mult": 4, "gamma": "0"}),
    _surface("moser-5", "z*conj(z) + z^5 + conj(z)^5", ("moser", "bishop", "surface"), {"mult": 5, "gamma": "0"}),
]


def select(filter_: str | None = None) -> list[Fixture]:
    if not filter_:
        return list(FIXTURES)
    return [f for f in FIXTURES
            if filter_ in f.tags or f.name == filter_ or f.name.startswith(filter_ + "-")]


@dataclass
class Row:
    fixture: str
    check: str
    expected: str
    got: str
    ok: bool


def check_fixture(fx: Fixture, trials: int = 5) -> list[Row]:
    from .analysis import analyze

    man = fx.load()
    rep, code = analyze(man, trials=trials)
    rows = []
    exp = fx.expect

    def add(check, expected, got):
        rows.append(Row(fx.name, check, str(expected), str(got), str(expected) == str(got)))

    if code == 2:
        add("theorem", "no violation", "THEOREM_VIOLATION")
    if "S" in exp:
        M = man.manifold
        L = cr_singular_locus(M, seed=man.seed)
        given = [parse(g, M.ring) for g in exp["S"]]
        expected = given + [g.conj() for g in given] + M.complex_equations()
        cmp = same_real_locus(L.real_ideal_generators(), expected, exact=True)
        add("singular locus", "equal", "equal" if cmp["equal"] else "differs")
    sl = rep["singular_locus"]
    if "classification" in exp:
        add("classification", exp["classification"], sl["classification"]["value"])
    if "origin" in exp:
        from .crlocus import classify_point
        M = man.manifold
        L = cr_singular_locus(M, seed=man.seed)
        pc = classify_point(M, L, {c: GQ(0) for c in M.coords})
        add("class at origin", exp["origin"], pc.classification)
    if "dim_S" in exp:
        add("dim S", exp["dim_S"], sl["dim_real_at_generic_point"]["value"])
    if "obstruction" in exp:
        add("dimension obstruction", exp["obstruction"],
            rep.get("leviflat", {}).get("dimension_obstruction", {}).get("verdict"))
    if "mult" in exp:
        mult = rep["finiteness"]["multiplicity"]
        got = mult.get("k_local_ring", {}).get("value")
        add("mult (local ring)", "INFINITE" if exp["mult"] is INFINITE else exp["mult"], got)
        add("methods agree", True, mult["agree"])
    if "finite" in exp:
        add("finite", exp["finite"], rep["finiteness"]["finite"])
    if "gamma" in exp:
        add("Bishop gamma", exp["gamma"], rep["invariants"]["bishop"]["gamma"]["value"])
    if "jacobian" in exp:
        add("J_F", exp["jacobian"], rep["resolution"]["jacobian"])
    res = rep.get("resolution")
    if res and "pullback" in res and "ok" in res["pullback"]:
        add("pullback of S", True, res["pullback"]["ok"])
        add("phi = J_F^2 is CR", True, res["candidate"]["ok"])
    for hv in rep.get("hypervarieties", []):
        add("M inside hypervariety", True, hv["contains_M"])
    return rows


def run_fixtures(filter_: str | None = None, workers: int = 4) -> list[Row]:
    fxs = select(filter_)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        results = list(pool.map(check_fixture, fxs))
    return [r for rows in results for r in rows]
