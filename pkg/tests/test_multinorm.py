import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torilat import intmat
from torilat.errors import EmptyMultiset, NotNormal, PreconditionFailed
from torilat.groups import (
    all_subgroups,
    catalog,
    catalog_group,
    double_coset_reps,
    index,
    intersection,
    conjugate,
    is_normal,
    maximal_subgroups,
    parse_subgroup_list,
)
from torilat.lattice import direct_sum, dual, permutation_lattice, restrict
from torilat.multinorm import (
    MultinormData,
    SubgroupMultiset,
    absorb_unit_weights,
    build_I,
    build_J,
    conj_replace,
    is_strongly_reduced,
    quotient_descend,
    reduce_multiplicities,
    reduce_rded,
    reduce_rdtr,
    reduce_to_reduced,
    restrict_multinorm,
    strongly_reduce,
)


def subs(G, text):
    return parse_subgroup_list(G, text)


def rank_formula(G, data):
    return sum(len(w) * index(G, H) for H, w in data.entries) - 1


def assert_reconstructs(trace):
    """The certificate conjugates the target sum back onto the source sum, matrix by matrix."""
    cert = trace.replay()
    G = cert.group
    src = direct_sum(build_I(G, cert.start), *[permutation_lattice(G, H) for H in cert.left])
    dst = direct_sum(build_I(G, cert.end), *[permutation_lattice(G, H) for H in cert.right])
    Psi = cert.matrix
    inv = intmat.to_array(intmat.inverse_unimodular(intmat.as_rows(Psi)))
    for g in range(G.order):
        assert np.array_equal(intmat.imatmul(inv, intmat.imatmul(dst.action(g), Psi)), src.action(g))
    cert.verify_dual()
    return cert


# -- lattice construction ---------------------------------------------------


def test_quadratic_norm_one_torus():
    G = catalog_group("C2")
    J = build_J(G, [G.trivial])
    assert J.rank == 1 and J.action(1).tolist() == [[-1]]


def test_rank_of_dihedral_pair():
    G = catalog_group("D4")
    assert build_J(G, subs(G, "<t>,<st>")).rank == 7


@pytest.mark.parametrize("G", [g for g in catalog(8) if g.order > 1], ids=lambda G: G.label)
def test_rank_formula_and_duality(G):
    S = all_subgroups(G)
    for a, b in itertools.combinations_with_replacement(S, 2):
        data = MultinormData.make(SubgroupMultiset.of([a, b]))
        I = build_I(G, data)
        assert I.rank == rank_formula(G, data)
        assert build_J(G, data) == dual(I)


def test_entry_order_independence():
    G = catalog_group("D4")
    a, b, c = subs(G, "<t>,<st>,<s^2>")
    assert build_J(G, [a, b, c]) == build_J(G, [c, a, b]) == build_J(G, [b, c, a])


def test_empty_multiset_rejected():
    G = catalog_group("C2")
    with pytest.raises(EmptyMultiset):
        build_I(G, MultinormData(()))


def test_v4_weighted_lattice_rank():
    G = catalog_group("C2xC2")
    data = MultinormData(((G.trivial, (1,)), (G.whole, (2,))))
    assert build_I(G, data).rank == 4


# -- single reduction steps ----------------------------------------------------


def test_rded_multiplicity_two():
    G = catalog_group("D4")
    (H,) = subs(G, "<t>")
    data = MultinormData(((H, (1, 1)),))
    new, tr = reduce_rded(G, data, None, (H, 1, H, 0))
    assert new.entries == ((H, (1,)),)
    assert tr.split_summands() == ([], [H])
    assert build_I(G, new).rank == build_I(G, data).rank - index(G, H)
    tr.verify()
    assert_reconstructs(tr)


def test_rded_drops_whole_group_member():
    G = catalog_group("C2xC2")
    data = MultinormData.unit([G.trivial, G.whole])
    new, tr = reduce_rded(G, data, None, (G.trivial, 0, G.whole, 0))
    assert new.set == (G.whole,)
    new2, tr2 = reduce_to_reduced(G, data)
    assert new2.set == (G.whole,)
    assert_reconstructs(tr2)


def test_rded_precondition():
    G = catalog_group("D4")
    a, b = subs(G, "<t>,<st>")
    with pytest.raises(PreconditionFailed):
        reduce_rded(G, [a, b], None, (a, 0, b, 0))


@pytest.mark.parametrize("weights, expected", [((2, 3), 1), ((2, 4), 2), ((3,), 3)])
def test_reduce_multiplicities_gcd(weights, expected):
    G = catalog_group("D4")
    (H,) = subs(G, "<t>")
    data = MultinormData(((H, weights), (G.trivial, (1,))))
    new, tr = reduce_multiplicities(G, data)
    assert new.weight(H) == (expected,)
    assert len(tr.split_summands()[1]) == len(weights) - 1
    assert_reconstructs(tr)


def test_rdtr_elementary_abelian():
    G = catalog_group("C2xC2")
    (H,) = subs(G, "<s>")
    data = MultinormData(((G.whole, (2,)), (H, (1,))))
    new, tr = reduce_rdtr(G, data, None, (G.whole, 0, H))
    assert new.set == (H,)
    assert build_I(G, new).rank == build_I(G, data).rank - 1
    assert_reconstructs(tr)


def test_rdtr_self_absorption():
    G = catalog_group("C3")
    data = MultinormData(((G.trivial, (1, 1)),))
    new, tr = reduce_rdtr(G, data, None, (G.trivial, 1, G.trivial))
    assert new.weight(G.trivial) == (1,)
    assert_reconstructs(tr)


def test_rdtr_precondition():
    G = catalog_group("C2xC2")
    (H,) = subs(G, "<s>")
    with pytest.raises(PreconditionFailed):
        reduce_rdtr(G, MultinormData(((G.whole, (1,)), (H, (1,)))), None, (G.whole, 0, H))


def test_conjugation_replacement():
    G = catalog_group("D4")
    a, b = subs(G, "<t>,<st>")
    s = G.word("s")
    new, tr = conj_replace(G, [a, b], a, s)
    assert conjugate(G, a, s) in new.set
    assert build_I(G, new).rank == build_I(G, [a, b]).rank
    assert_reconstructs(tr)


def test_strongly_reduce_d8_example():
    G = catalog_group("D8")
    HH = subs(G, "<t>,<s^2t>,<st>")
    new, tr = strongly_reduce(G, HH)
    assert set(new.set) == set(subs(G, "<t>,<st>"))
    assert tr.split_summands() == ([], subs(G, "<t>"))
    assert_reconstructs(tr)


def test_strongly_reduce_abelian_is_reduced():
    G = catalog_group("C4xC2")
    for a, b in itertools.combinations(all_subgroups(G), 2):
        if a.issubset(b) or b.issubset(a):
            continue
        new, tr = strongly_reduce(G, [a, b])
        assert set(new.set) == {a, b}
        assert not tr.steps


def test_strongly_reduced_output():
    G = catalog_group("D4")
    for combo in itertools.combinations(all_subgroups(G), 3):
        if any(x.issubset(y) for x in combo for y in combo if x != y):
            continue
        new, tr = strongly_reduce(G, list(combo))
        assert is_strongly_reduced(G, new.set)
        tr.verify()


def test_absorb_identity_and_failure():
    G = catalog_group("D4")
    a, b = subs(G, "<t>,<st>")
    new, tr = absorb_unit_weights(G, [a, b])
    assert new.set == tuple(sorted([a, b], key=lambda H: H.key())) and not tr.steps
    # weight 2 on <st> is absorbed by <t> since (<st> : <st> meet <t>) = 2 divides it
    new, tr = absorb_unit_weights(G, MultinormData(((a, (1,)), (b, (2,)))))
    assert new.set == (a,)
    assert_reconstructs(tr)
    with pytest.raises(PreconditionFailed):
        absorb_unit_weights(G, MultinormData(((a, (1,)), (b, (3,)))))


def test_absorb_mixed_weights():
    G = catalog_group("C2xC2xC2")
    H1, H2 = subs(G, "<r,s>,<r,t>")
    data = MultinormData(((H1, (1,)), (H2, (1,)), (G.trivial, (4,)), (G.whole, (2,))))
    new, tr = absorb_unit_weights(G, data)
    assert set(new.set) == {H1, H2}
    tr.verify()
    assert_reconstructs(tr)


# -- reduction to the reduced set --------------------------------------------


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(["D4", "Q8", "C4xC2", "C2xC2xC2", "D3", "C6"]), st.data())
def test_reduce_to_reduced_replays(name, data):
    G = catalog_group(name)
    S = all_subgroups(G)
    members = data.draw(st.lists(st.sampled_from(S), min_size=1, max_size=4))
    start = MultinormData.make(SubgroupMultiset(tuple((H, 1) for H in members)))
    new, tr = reduce_to_reduced(G, start)
    assert SubgroupMultiset(tuple((H, 1) for H in new.set)).is_reduced()
    assert set(new.set) == set(SubgroupMultiset.of(members).reduced())
    assert build_I(G, new).rank + sum(index(G, H) for H in tr.split_summands()[1]) == build_I(G, start).rank
    assert_reconstructs(tr)


# -- restriction and quotient ---------------------------------------------------


def test_restriction_examples():
    G = catalog_group("D4")
    t, s = subs(G, "<t>,<s>")
    P, data, tr = restrict_multinorm(G, [t], None, s)
    assert data.set == (P.trivial,) and P.order == 4
    assert build_J(P, data) == restrict(build_J(G, [t]), s) or build_J(P, data).rank == 3
    tr.verify()
    V = catalog_group("C2xC2")
    a, b = subs(V, "<s>,<t>")
    P, data, tr = restrict_multinorm(V, [a, b], None, a)
    # two double cosets <s>\V/<s>, one <s>\V/<t> with trivial intersection
    assert sorted((H.order, len(w)) for H, w in data.entries) == [(1, 1), (2, 2)]
    tr.verify()


def test_restriction_to_whole_group_is_identity():
    G = catalog_group("D4")
    HH = subs(G, "<t>,<st>")
    P, data, tr = restrict_multinorm(G, HH, None, G.whole)
    assert P.order == 8
    assert build_J(P, data).rank == build_J(G, HH).rank


@pytest.mark.parametrize("G", [g for g in catalog(16) if 1 < g.order], ids=lambda G: G.label)
def test_mackey_rank_identity(G):
    subs_ = all_subgroups(G)
    for H in subs_:
        for P in subs_:
            total = sum(
                P.order // intersection(P, conjugate(G, H, g)).order for g in double_coset_reps(G, P, H)
            )
            assert total == index(G, H)
            assert restrict(permutation_lattice(G, H), P).rank == total


@pytest.mark.parametrize("name", ["D4", "Q8", "C2xC2xC2", "D3"])
def test_restriction_rank(name):
    G = catalog_group(name)
    for a, b in itertools.combinations(all_subgroups(G), 2):
        for P in maximal_subgroups(G):
            Pg, data, tr = restrict_multinorm(G, [a, b], None, P)
            assert build_J(Pg, data).rank == build_J(G, [a, b]).rank
            tr.verify()


def test_quotient_example_apt1():
    G = catalog_group("C2xC2xC2")
    r, st_ = subs(G, "<r>,<s,t>")
    Q, data, tr = quotient_descend(G, [r, st_], None, r)
    assert Q.order == 4
    assert sorted((H.order, w) for H, w in data.entries) == [(1, (1,)), (4, (2,))]
    tr.verify()


def test_quotient_by_trivial_is_identity():
    G = catalog_group("D4")
    HH = subs(G, "<t>,<st>")
    Q, data, tr = quotient_descend(G, HH, None, G.trivial)
    assert Q.order == 8 and build_J(Q, data).rank == 7


def test_quotient_requires_normal():
    G = catalog_group("D4")
    (t,) = subs(G, "<t>")
    with pytest.raises(NotNormal):
        quotient_descend(G, [t], None, t)


@pytest.mark.parametrize("name", ["D4", "Q8", "C4xC2", "C2xC2xC2", "D6"])
def test_quotient_rank_identity(name):
    G = catalog_group(name)
    normals = [N for N in all_subgroups(G) if is_normal(G, N)]
    for a, b in itertools.combinations(all_subgroups(G), 2):
        for N in normals:
            Q, data, tr = quotient_descend(G, [a, b], None, N)
            assert build_J(Q, data).rank == rank_formula(Q, data)
            tr.verify()
