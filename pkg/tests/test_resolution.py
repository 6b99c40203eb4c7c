import random

import pytest

from crsing.algebra import AlgebraError, GQ
from crsing.crlocus import ManifoldSpec
from crsing.resolution import (HoloMap, NormalFormData, SourceManifold, build_resolution_map,
                               eliminate_harmonic_terms, graph_leviflat_resolution, immersion_rank,
                               invert_change, nonextendable_candidate, pullback_singular_locus,
                               verify_parametrization)


def test_m0_resolution():
    data = NormalFormData.from_strings(2, "z1*conj(z1)")
    F, N = build_resolution_map(data)
    assert [str(c) for c in F.components] == ["t1 + I*t2", "t1^2 + t2^2"]
    assert str(F.jacobian()) == "-2*I*t1 + 2*t2"
    assert verify_parametrization(F, N, data.manifold())
    assert immersion_rank(F, N) == 2


def test_harmonic_terms_removed():
    data = NormalFormData.from_strings(3, "z1*conj(z1) + x2^2", ["z1^2 + conj(z1)^2 + z1*conj(z1)"])
    assert not data.has_no_harmonic_terms()
    new, change = eliminate_harmonic_terms(data)
    assert not change.is_identity()
    assert new.has_no_harmonic_terms()
    assert str(new.rs[0]) == "z1*conj(z1)"
    back = invert_change(new, change)
    assert back.rho == data.rho and back.rs == data.rs


def test_normal_form_rejects_bad_data():
    with pytest.raises(AlgebraError):
        NormalFormData.from_strings(2, "z1 + conj(z1)").check()


def test_leviflat_chart_parametrizes():
    M = ManifoldSpec.graph("z1*conj(z2) - conj(z2)^2/2", ["z1", "z2"], "w")
    F, N = graph_leviflat_resolution(M)
    assert verify_parametrization(F, N, M)
    assert N.kind == "Levi-flat"


def test_double_cover_map_jacobian_and_evaluation():
    F = HoloMap.from_strings(["z", "w1", "w2"], ["z", "w1 + I*w2", "(w1 - I*w2)^2"], ["z1", "z2", "w"])
    assert str(F.jacobian()) == "-4*I*w1 - 4*w2"
    assert F({"z": GQ(1), "w1": GQ(1), "w2": GQ(0)}) == {"z1": GQ(1), "z2": GQ(1), "w": GQ(1)}


def test_detects_a_wrong_manifold():
    data = NormalFormData.from_strings(2, "z1*conj(z1) + z1^3 + conj(z1)^3")
    F, N = build_resolution_map(data)
    other = NormalFormData.from_strings(2, "z1*conj(z1) + z1^4 + conj(z1)^4").manifold()
    assert not verify_parametrization(F, N, other)


def test_m0_candidate_and_pullback():
    data = NormalFormData.from_strings(2, "z1*conj(z1)")
    F, N = build_resolution_map(data)
    M = data.manifold()
    rep = nonextendable_candidate(F, N, M, seed=2, count=5)
    assert rep.ok and not rep.failures
    pb = pullback_singular_locus(F, N, M, seed=2, count=5)
    assert pb.ok


def test_source_manifold_points():
    N = SourceManifold.parametrized(["a", "b"], {"z": "a + I*b", "w": "a^2"})
    assert N.point({"a": GQ(1), "b": GQ(2)}) == {"z": GQ(1, 2), "w": GQ(1)}
    u = N.random_params(random.Random(0))
    assert set(u) == {"a", "b"}
