"""INI manifests describing a manifold, an optional map and analysis options.

```
[manifold]
form = graph            # graph | general | normal
coords = z1, z2
graph_var = w
rho = z1*conj(z2)^2

[map]                   # optional explicit resolution
source = z, w1, w2
target = z1, z2, w
components = z; w1 + I*w2; (w1 - I*w2)^2
source_kind = parametrized
params = a, b, s1, s2
param_z = a + I*b

[options]
seed = 0
degree_cap = 12
```

List-valued keys use ``;`` between polynomials and ``,`` between names.
"""

from __future__ import annotations

import configparser
import re
from dataclasses import dataclass, field
from pathlib import Path

from .algebra import DEFAULT_DEGREE_CAP, AlgebraError, ParseError, Polynomial, Ring, parse
from .crlocus import ManifoldSpec
from .resolution import (HoloMap, NormalFormData, SourceManifold, build_resolution_map,
                         eliminate_harmonic_terms)


class ManifestError(ValueError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        loc = f"line {line}" + (f", column {col}" if col else "") if line else ""
        super().__init__(f"{loc}: {message}" if loc else message)
        self.line = line
        self.col = col


@dataclass
class Manifest:
    name: str
    manifold: ManifoldSpec
    data: NormalFormData | None = None
    change: object = None
    map: HoloMap | None = None
    source: SourceManifold | None = None
    options: dict = field(default_factory=dict)
    hypersurfaces: list[Polynomial] = field(default_factory=list)
    leviflat_assertion: str | None = None

    @property
    def seed(self) -> int:
        return int(self.options.get("seed", 0))

    @property
    def degree_cap(self) -> int:
        return int(self.options.get("degree_cap", DEFAULT_DEGREE_CAP))


def _names(s: str) -> list[str]:
    return [x.strip() for x in s.split(",") if x.strip()]


def _items(s: str) -> list[str]:
    return [x.strip() for x in s.split(";") if x.strip()]


def _locate(text: str, section: str, key: str) -> int | None:
    cur = None
    for i, line in enumerate(text.splitlines(), 1):
        m = re.match(r"\s*\[([^\]]+)\]", line)
        if m:
            cur = m.group(1).strip()
        elif cur == section and re.match(rf"\s*{re.escape(key)}\s*[=:]", line):
            return i
    return None


class _Reader:
    def __init__(self, text: str):
        self.text = text
        cp = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
        try:
            cp.read_string(text)
        except configparser.Error as exc:
            raise ManifestError(f"malformed manifest: {exc}", getattr(exc, "lineno", None)) from None
        self.cp = cp

    def get(self, section, key, default=None, required=False):
        if self.cp.has_option(section, key):
            return self.cp.get(section, key)
        if required:
            raise ManifestError(f"missing [{section}] {key}")
        return default

    def poly(self, section, key, text, ring):
        try:
            return parse(text, ring)
        except ParseError as exc:
            line = _locate(self.text, section, key)
            raise ManifestError(f"[{section}] {key}: {exc}", line, exc.col) from None
        except AlgebraError as exc:
            raise ManifestError(f"[{section}] {key}: {exc}", _locate(self.text, section, key)) from None


def load_manifest(path: str | Path) -> Manifest:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ManifestError(f"cannot read {p}: {exc.strerror}") from None
    return parse_manifest(text, name=p.stem)


def parse_manifest(text: str, name: str = "manifest") -> Manifest:
    r = _Reader(text)
    if not r.cp.has_section("manifold"):
        raise ManifestError("missing [manifold] section")
    name = r.get("manifold", "name", name)
    form = r.get("manifold", "form", "graph").strip()
    opts = dict(r.cp.items("options")) if r.cp.has_section("options") else {}
    data = change = None
    if form == "graph":
        zs = _names(r.get("manifold", "coords", required=True))
        w = r.get("manifold", "graph_var", "w").strip()
        ring = Ring.complex(zs + [w])
        rho = r.poly("manifold", "rho", r.get("manifold", "rho", required=True), ring)
        try:
            M = ManifoldSpec.graph(rho, zs, w, name=name)
        except AlgebraError as exc:
            raise ManifestError(str(exc), _locate(text, "manifold", "rho")) from None
    elif form == "general":
        coords = _names(r.get("manifold", "coords", required=True))
        ring = Ring.complex(coords)
        eqs = [r.poly("manifold", "equations", e, ring)
               for e in _items(r.get("manifold", "equations", required=True))]
        try:
            M = ManifoldSpec.general(eqs, coords, name=name)
        except AlgebraError as exc:
            raise ManifestError(str(exc), _locate(text, "manifold", "equations")) from None
    elif form == "normal":
        n = int(r.get("manifold", "n", required=True))
        ring = NormalFormData.make_ring(n)
        rho = r.poly("manifold", "rho", r.get("manifold", "rho", required=True), ring)
        rs = [r.poly("manifold", "r", e, ring) for e in _items(r.get("manifold", "r", ""))]
        rs = rs or [ring.zero()] * (n - 2)
        if len(rs) != n - 2:
            raise ManifestError(f"expected {n - 2} functions in [manifold] r",
                                _locate(text, "manifold", "r"))
        data = NormalFormData(n, rho, rs)
        try:
            data.check()
        except AlgebraError as exc:
            raise ManifestError(str(exc), _locate(text, "manifold", "rho")) from None
        data, change = eliminate_harmonic_terms(data, int(opts.get("degree_cap", DEFAULT_DEGREE_CAP)))
        M = data.manifold()
        M.name = name
    else:
        raise ManifestError(f"unknown form {form!r}", _locate(text, "manifold", "form"))
    man = Manifest(name, M, data, change, options=opts)
    if data is not None:
        man.map, man.source = build_resolution_map(data)
    if r.cp.has_section("map"):
        _read_map(r, man)
    hs = r.get("options", "hypersurfaces")
    if hs:
        sring = Ring.complex(man.map.source_names) if man.map else M.ring
        man.hypersurfaces = [r.poly("options", "hypersurfaces", h, sring) for h in _items(hs)]
    man.leviflat_assertion = r.get("options", "leviflat_assertion")
    return man


def _read_map(r: _Reader, man: Manifest) -> None:
    source = _names(r.get("map", "source", required=True))
    target = _names(r.get("map", "target", ",".join(man.manifold.coords)))
    sring = Ring.complex(source, conj=False)
    comps = [r.poly("map", "components", c, sring) for c in _items(r.get("map", "components", required=True))]
    if len(comps) != len(target):
        raise ManifestError("number of map components does not match the target coordinates",
                            _locate(r.text, "map", "components"))
    try:
        man.map = HoloMap(comps, target_names=target)
    except AlgebraError as exc:
        raise ManifestError(str(exc), _locate(r.text, "map", "components")) from None
    kind = r.get("map", "source_kind", "totally-real").strip()
    if kind == "totally-real":
        man.source = SourceManifold.totally_real(source)
    elif kind == "levi-flat":
        real = _names(r.get("map", "real", required=True))
        man.source = SourceManifold.leviflat(real, [s for s in source if s not in real])
    elif kind == "parametrized":
        params = _names(r.get("map", "params", required=True))
        pring = Ring.real(params)
        exprs = {}
        for s in source:
            key = f"param_{s}"
            exprs[s] = r.poly("map", key, r.get("map", key, required=True), pring)
        man.source = SourceManifold(kind, pring, exprs)
    else:
        raise ManifestError(f"unknown source_kind {kind!r}", _locate(r.text, "map", "source_kind"))
