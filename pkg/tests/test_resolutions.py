import numpy as np
import pytest

from torilat.errors import PreconditionFailed, SizeCap, VerificationError
from torilat.lattice import LatticeHom
from torilat.resolutions import (
    ComplexVerificationError,
    ExplicitComplex,
    apt1_complex,
    apt2_complex,
    cm_dihedral_construction,
    dihedral_sequence,
    fixture,
    structural_claims,
    v4_sequence,
)

FAST = ["dihedral:1", "dihedral:2", "dihedral:3", "dihedral:4", "dihedral:5", "v4", "apt1", "apt2", "nlqp:3:1", "nlqp:3:2", "nlqp:5:2"]


@pytest.mark.parametrize("spec", FAST)
def test_fixture_claims_hold(spec):
    cx = fixture(spec)
    assert cx.ok
    assert cx.claims
    assert all(c.holds for c in cx.structural_claims())
    js = cx.to_json()
    assert js["name"] == cx.name


@pytest.mark.slow
def test_largest_cm_dihedral_fixture():
    assert cm_dihedral_construction(3, 3).ok


@pytest.mark.parametrize("spec", ["dihedral:3", "v4", "apt1", "apt2", "nlqp:3:2"])
@pytest.mark.parametrize("seed", [1, 2])
def test_rebased_variants_verify(spec, seed):
    cx = fixture(spec).rebased(seed)
    assert cx.ok
    for f in cx.maps:
        f.check()


def test_dihedral_sequence_shape():
    for m in range(1, 6):
        cx = dihedral_sequence(m)
        assert cx.group.order == 4 * m
        assert [L.rank for L in cx.lattices] == [2, 4 * m + 1, 4 * m + 1 - 2]
        assert {"iota", "omega", "psi"} <= set(cx.auxiliary)


def test_claim_levels():
    cx = cm_dihedral_construction(3, 2)
    levels = {c.level for c in cx.claims}
    assert levels == {"exact", "necessary"}
    assert all(c.level == "exact" for c in cx.claims if c.kind in ("ComposesToZero", "Exact"))


def test_preconditions():
    with pytest.raises(PreconditionFailed):
        cm_dihedral_construction(4, 2)
    with pytest.raises(PreconditionFailed):
        cm_dihedral_construction(3, 0)
    with pytest.raises(SizeCap):
        cm_dihedral_construction(7, 3)
    with pytest.raises(PreconditionFailed):
        dihedral_sequence(0)


def test_unknown_fixture():
    with pytest.raises(PreconditionFailed):
        fixture("nonsense")


def _broken(cx: ExplicitComplex, k: int, factor: int) -> list:
    maps = list(cx.maps)
    f = maps[k]
    maps[k] = LatticeHom(f.source, f.target, f.matrix * factor, check=False)
    return structural_claims(cx.lattices, maps, cx.labels)


@pytest.mark.parametrize("spec", ["dihedral:2", "v4", "apt1", "apt2"])
def test_scaled_map_breaks_exactness(spec):
    cx = fixture(spec)
    for k in range(len(cx.maps)):
        claims = _broken(cx, k, 2)
        assert not all(c.holds for c in claims), k


def test_zeroed_map_breaks_exactness():
    cx = v4_sequence()
    claims = _broken(cx, 0, 0)
    assert not all(c.holds for c in claims)


def test_nonequivariant_map_is_rejected():
    cx = dihedral_sequence(2)
    f = cx.maps[0]
    bad = f.matrix.copy()
    bad[0, 0] += 1
    with pytest.raises(VerificationError):
        LatticeHom(f.source, f.target, bad)


def test_failed_claim_raises_with_claim_list():
    cx = apt1_complex()
    claims = _broken(cx, len(cx.maps) - 1, 3)
    broken = ExplicitComplex(cx.name, cx.group, cx.lattices, cx.maps, claims, cx.labels)
    assert not broken.ok
    with pytest.raises(ComplexVerificationError) as info:
        broken.verify()
    assert info.value.name == cx.name
    assert any(not c.holds for c in info.value.claims)


def test_apt2_printed_data():
    cx = apt2_complex()
    kinds = {c.kind for c in cx.claims}
    assert cx.ok and len(kinds) > 3
    assert any("U^G" in c.where or "rank" in c.kind.lower() for c in cx.claims)
