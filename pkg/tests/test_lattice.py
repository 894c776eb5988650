import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torilat import intmat
from torilat.errors import VerificationError
from torilat.groups import all_subgroups, catalog, catalog_group, index, is_normal, parse_subgroup_list, quotient
from torilat.lattice import (
    FinAb,
    GLattice,
    LatticeHom,
    cofixed_part,
    coset_data,
    direct_sum,
    dual,
    fixed_part,
    hom_kernel,
    inflate,
    invariants,
    matrix_cokernel,
    permutation_lattice,
    restrict,
    sublattice,
)

SMALL = [G for G in catalog(12) if G.order > 1]


def test_finab_normalisation():
    assert FinAb.from_orders([4, 6]) == FinAb(0, (2, 12))
    assert FinAb.from_orders([2, 3]) == FinAb(0, (6,))
    assert FinAb(0, (1, 1)).is_zero
    assert FinAb(0, (2, 4)).order == 8 and FinAb(0, (2, 4)).exponent == 4
    assert FinAb(1, (2,)) + FinAb(0, (3,)) == FinAb(1, (6,))
    with pytest.raises(ValueError):
        FinAb(0, (4, 2))
    for A in [FinAb(0, (2, 4)), FinAb(2, ()), FinAb(0, ()), FinAb(1, (3, 3))]:
        assert FinAb.parse(str(A)) == A


def test_finab_from_orders_matches_structure():
    # Z/m + Z/n is cyclic exactly when gcd(m, n) = 1
    for m, n in itertools.product(range(1, 13), repeat=2):
        A = FinAb.from_orders([m, n])
        assert A.order == m * n
        assert (len(A.torsion) <= 1) == (np.gcd(m, n) == 1)


@pytest.mark.parametrize("G", SMALL, ids=lambda G: G.label)
def test_permutation_lattices_are_homomorphisms(G):
    for H in all_subgroups(G):
        M = permutation_lattice(G, H)
        assert M.rank == index(G, H)
        for a, b in itertools.product(range(G.order), repeat=2):
            assert np.array_equal(M.action(G.mul(a, b)), M.action(a) @ M.action(b))
        assert len(invariants(M)) == 1


def test_coset_data_partitions_group():
    G = catalog_group("D4")
    for H in all_subgroups(G):
        cd = coset_data(G, H)
        flat = sorted(x for c in cd.cosets for x in c)
        assert flat == list(range(G.order))
        assert all(cd.coset_of[x] == i for i, c in enumerate(cd.cosets) for x in c)


def test_bad_action_rejected():
    G = catalog_group("C2")
    with pytest.raises(VerificationError):
        GLattice(G, [np.array([[2]])])


def test_dual_is_involution_and_contragredient():
    G = catalog_group("D3")
    H = parse_subgroup_list(G, "<t>")[0]
    M = direct_sum(permutation_lattice(G, H), GLattice.trivial(G, 2))
    D = dual(M)
    for g in range(G.order):
        assert np.array_equal(D.action(g), np.linalg.inv(M.action(g)).T.round().astype(int))
    assert dual(D) == M


def test_equivariance_check():
    G = catalog_group("C3")
    P = permutation_lattice(G, G.trivial)
    Z = GLattice.trivial(G)
    LatticeHom(P, Z, [[1, 1, 1]])
    with pytest.raises(VerificationError):
        LatticeHom(P, Z, [[1, 0, 0]])


def test_augmentation_kernel():
    G = catalog_group("C4")
    P = permutation_lattice(G, G.trivial)
    f = LatticeHom(P, GLattice.trivial(G), [[1, 1, 1, 1]])
    K, inc = hom_kernel(f)
    assert K.rank == 3
    assert not intmat.imatmul(f.matrix, inc.matrix).any()
    assert intmat.is_saturated(inc.matrix)


def test_sublattice_rejects_unstable_span():
    G = catalog_group("C2")
    P = permutation_lattice(G, G.trivial)
    with pytest.raises(VerificationError):
        sublattice(P, [[1, 0]])


def test_restriction_of_permutation_lattice_is_mackey():
    G = catalog_group("D4")
    H, P = parse_subgroup_list(G, "<t>,<s>")
    R = restrict(permutation_lattice(G, H), P)
    # D4 = <s> <t>, so the restriction is one transitive orbit Z[P/(P meet H)] = Z[C4]
    assert R.rank == 4
    assert len(invariants(R)) == 1


@pytest.mark.parametrize("G", SMALL, ids=lambda G: G.label)
def test_fixed_and_cofixed_parts(G):
    for N in all_subgroups(G):
        if not is_normal(G, N):
            continue
        M = permutation_lattice(G, G.trivial)
        F, emb, q = fixed_part(M, N)
        # Z[G]^N = Z[G/N]
        assert F.rank == q.target.order
        assert len(invariants(F)) == 1
        C = cofixed_part(M, N)
        assert C.rank == q.target.order


def test_inflate_then_fixed_part_is_everything():
    G = catalog_group("D4")
    N = parse_subgroup_list(G, "<s^2>")[0]
    q = quotient(G, N)
    M = permutation_lattice(q.target, q.target.trivial)
    infl = inflate(M, q)
    F, _, _ = fixed_part(infl, N)
    assert F.rank == M.rank


@settings(max_examples=80, deadline=None)
@given(st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=1, max_size=4))
def test_matrix_cokernel_orders(rows):
    A = intmat.to_array(rows).T  # 3 x k
    fa, img = matrix_cokernel(A, 3)
    diag = intmat.smith_diagonal(intmat.as_rows(A), A.shape[1])
    assert img.rank == len(diag)
    assert fa.free_rank == 3 - img.rank
    prod = 1
    for d in diag:
        prod *= d
    assert (fa.order or prod) == prod or fa.free_rank
