import pytest

from crsing.manifest import ManifestError, load_manifest, parse_manifest


def test_graph_manifest():
    man = parse_manifest("[manifold]\ncoords = z1, z2\nrho = z1*conj(z2)^2  # union\n[options]\nseed = 4\n")
    assert man.manifold.n == 3 and man.seed == 4 and man.map is None


def test_normal_form_manifest_builds_map():
    man = parse_manifest("[manifold]\nform = normal\nn = 3\nrho = z1*conj(z1)\nr = z1^2 + conj(z1)^2\n")
    assert man.map is not None and man.source is not None
    assert not man.change.is_identity()
    assert man.data.has_no_harmonic_terms()


def test_general_manifest():
    man = parse_manifest("[manifold]\nform = general\ncoords = z, w\n"
                         "equations = Re(w) - z*conj(z); Im(w)\n")
    assert man.manifold.d == 2


@pytest.mark.parametrize("text,where", [
    ("[manifold]\ncoords = z\nrho = z*conj(z) + (z^2\n", "line 3"),
    ("[manifold]\ncoords = z\nrho = z*q\n", "line 3"),
    ("[manifold]\nform = sphere\n", "line 2"),
    ("[manifold]\ncoords = z\n", "missing [manifold] rho"),
    ("rho = z\n", "malformed"),
    ("[manifold]\nform = normal\nn = 3\nrho = z1*conj(z1)\nr = z1; x2\n", "line 5"),
    ("[manifold]\ncoords = z\nrho = z*conj(z)\n[map]\nsource = t\ncomponents = t\n", "does not match"),
])
def test_errors(text, where):
    with pytest.raises(ManifestError) as e:
        parse_manifest(text)
    assert where in str(e.value)


def test_missing_file(tmp_path):
    with pytest.raises(ManifestError):
        load_manifest(tmp_path / "nope.ini")
