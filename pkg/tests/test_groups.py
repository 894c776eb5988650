import itertools

import pytest

from torilat.errors import ParseError
from torilat.groups import (
    abelianization_invariants,
    all_subgroups,
    are_conjugate,
    catalog,
    catalog_group,
    center,
    closure,
    conjugate,
    derived_subgroup,
    dihedral,
    dihedral_generators,
    group_from_json,
    index,
    is_normal,
    maximal_subgroups,
    normal_core,
    parse_subgroup_list,
    quotient,
    structure_report,
    subgroup_as_group,
    subgroup_label,
)


def brute_subgroups(G):
    """Subgroups reached by adjoining one element at a time, using only the Cayley table."""

    def close(S):
        S = set(S) | {0}
        frontier = list(S)
        while frontier:
            new = []
            for a in frontier:
                for b in list(S):
                    for c in (G.mul(a, b), G.mul(b, a)):
                        if c not in S:
                            S.add(c)
                            new.append(c)
            frontier = new
        return frozenset(S)

    found = {frozenset([0])}
    frontier = [frozenset([0])]
    while frontier:
        nxt = []
        for H in frontier:
            for g in range(G.order):
                if g not in H:
                    K = close(H | {g})
                    if K not in found:
                        found.add(K)
                        nxt.append(K)
        frontier = nxt
    return found


# Frozen after agreeing with brute_subgroups (checked below for every order <= 16).
SUBGROUP_COUNTS = {
    "C2xC2": 5, "D4": 10, "Q8": 6, "C2xC2xC2": 16, "C4xC2": 8, "C8": 4,
    "D3": 6, "A4": 10, "D6": 16, "Dic3": 8, "C3xC2xC2": 10, "C6xC2": 10,
    "D8": 19, "Q16": 11, "SD16": 15, "M16": 11, "C2xD4": 35, "C2xQ8": 19,
    "C4xC4": 15, "C8xC2": 11, "C4xC2xC2": 27, "E(2,4)": 67, "D5": 8, "D7": 10,
}


@pytest.mark.parametrize("name", sorted(SUBGROUP_COUNTS))
def test_subgroup_counts(name):
    G = catalog_group(name)
    subs = all_subgroups(G)
    assert len(subs) == SUBGROUP_COUNTS[name]
    assert {frozenset(H.elements) for H in subs} == brute_subgroups(G)


def test_s4_subgroup_count():
    assert len(all_subgroups(catalog_group("S4"))) == 30


@pytest.mark.parametrize("G", catalog(16), ids=lambda G: G.label)
def test_group_axioms_and_orders(G):
    G.validate()
    for g in range(G.order):
        assert G.mul(g, G.inv(g)) == 0
        assert G.power(g, G.element_order(g)) == 0


def test_words_and_names():
    D = catalog_group("D4")
    s, t = D.word("s"), D.word("t")
    assert D.element_order(s) == 4 and D.element_order(t) == 2
    assert D.mul(D.mul(t, s), t) == D.inv(s)
    assert D.word("s^2 t") == D.mul(D.power(s, 2), t)
    assert D.word("s^-1") == D.inv(s)
    assert D.word("1") == 0
    with pytest.raises(ParseError):
        D.word("q")


def test_parse_subgroup_list_and_label():
    D = catalog_group("D4")
    subs = parse_subgroup_list(D, "<t>,<st>,<s^2,t>")
    assert [H.order for H in subs] == [2, 2, 4]
    for H in subs:
        assert closure(D, [D.word(w) for w in subgroup_label(D, H).strip("<>").split(",")]) == H


def test_dihedral_order_convention():
    for n in range(2, 9):
        G = dihedral(n)
        assert G.order == 2 * n
        s, t = G.word("s"), G.word("t")
        assert G.element_order(s) == n and G.element_order(t) == 2
        assert G.conj(t, s) == G.inv(s)
        if n & (n - 1) == 0:
            nu, sigma, tau = dihedral_generators(G)
            assert 2**nu == n and G.element_order(sigma) == n and G.element_order(tau) == 2
        else:
            assert dihedral_generators(G) is None


@pytest.mark.parametrize(
    "name, kind, nu",
    [
        ("C2xC2", "Dihedral", 1), ("D4", "Dihedral", 2), ("D8", "Dihedral", 3), ("D16", "Dihedral", 4),
        ("SD16", "SemiDihedral", 3), ("Q8", "Quaternion", 3), ("Q16", "Quaternion", 4),
        ("C4xC2", "No", 0), ("M16", "No", 0), ("C8", "No", 0), ("D3", "No", 0),
    ],
)
def test_maximal_class_tags(name, kind, nu):
    tag = structure_report(catalog_group(name)).maximal_class
    assert (tag.kind, tag.nu) == (kind, nu)


@pytest.mark.parametrize(
    "name, inv",
    [
        ("D4", [2, 2]), ("Q8", [2, 2]), ("D3", [2]), ("A4", [3]), ("S4", [2]), ("Dic3", [4]),
        ("D6", [2, 2]), ("M16", [2, 4]), ("C3xD4", [2, 6]), ("Heis27", [3, 3]), ("C6xC2", [2, 6]),
    ],
)
def test_abelianization(name, inv):
    G = catalog_group(name)
    assert abelianization_invariants(G) == inv
    assert G.order // derived_subgroup(G).order == _product(inv)


def _product(xs):
    out = 1
    for x in xs:
        out *= x
    return out


@pytest.mark.parametrize("G", [g for g in catalog(16) if g.order > 1], ids=lambda G: G.label)
def test_quotients_by_normal_subgroups(G):
    for N in all_subgroups(G):
        if not is_normal(G, N):
            continue
        q = quotient(G, N)
        Q = q.target
        assert Q.order * N.order == G.order
        for a, b in itertools.product(range(G.order), repeat=2):
            assert q.projection[G.mul(a, b)] == Q.mul(q.projection[a], q.projection[b])
        for H in all_subgroups(G):
            assert q.preimage(q.image(H)).order == H.order * N.order // _meet(H, N)


def _meet(H, N):
    return len(set(H.elements) & set(N.elements))


def test_normal_core_and_center():
    D = catalog_group("D4")
    t, st = parse_subgroup_list(D, "<t>,<st>")
    assert normal_core(D, [t]).order == 1
    assert center(D).order == 2
    assert not is_normal(D, t)
    assert are_conjugate(D, t, conjugate(D, t, D.word("s"))) is not None


@pytest.mark.parametrize("G", [g for g in catalog(16) if g.order > 1], ids=lambda G: G.label)
def test_maximal_subgroups_are_maximal(G):
    subs = all_subgroups(G)
    maxes = maximal_subgroups(G)
    for M in maxes:
        assert M.order < G.order
        assert not any(M.issubset(K) and K != M and K.order < G.order for K in subs)
    if structure_report(G).prime:
        assert all(index(G, M) == structure_report(G).prime for M in maxes)


def test_subgroup_as_group_roundtrip():
    G = catalog_group("C2xD4")
    for P in maximal_subgroups(G):
        emb = subgroup_as_group(G, P)
        assert emb.group.order == P.order
        for H in all_subgroups(emb.group):
            assert emb.pull(emb.lift(H)) == H


def test_group_from_json():
    G = group_from_json({"type": "catalog", "name": "D4"})
    assert G.order == 8
    P = group_from_json({"type": "permutations", "degree": 4, "generators": [[1, 2, 3, 0], [1, 0, 2, 3]]})
    assert P.order == 24
    Pr = group_from_json({"type": "product", "factors": [{"type": "catalog", "name": "C3"}, {"type": "catalog", "name": "D4"}]})
    assert Pr.order == 24
