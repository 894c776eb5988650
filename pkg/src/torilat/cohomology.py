"""Exact group and Tate cohomology of G-lattices, plus flabby resolutions.

Two independent routes compute positive-degree cohomology:

* the production route works with crossed homomorphisms determined by their
  values on the generators (a Schreier-type relation matrix ``R``).  For a
  lattice ``M`` one has ``H^1(G, M) = ker R / B^1`` and, because
  ``H^2(G, M) = H^1(G, M (x) Q/Z)``, ``H^2(G, M)`` is the torsion of ``coker R``;
* the oracle route uses the inhomogeneous bar complex, where
  ``H^n(G, M)`` is the torsion of ``coker d^{n-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import intmat
from .config import cap
from .errors import DegreeUnsupported, SizeCap, VerificationError
from .groups import (
    FiniteGroup,
    Subgroup,
    _all_subgroups_cached,
    are_conjugate,
    closure,
    subgroup_label,
)
from .lattice import (
    FinAb,
    GLattice,
    LatticeHom,
    coset_data,
    direct_sum,
    dual,
    invariants,
    permutation_lattice,
    restrict,
)

SUPPORTED_DEGREES = (-1, 0, 1, 2)


def _check_cap(G: FiniteGroup, n: int) -> None:
    limit = cap("h2") if n == 2 else cap("cohomology")
    if G.order > limit:
        raise SizeCap(f"|G| = {G.order} exceeds the degree-{n} cap {limit}")


def _over(M: GLattice, H: Subgroup | None) -> GLattice:
    if H is None or H.order == M.group.order:
        return M
    return restrict(M, H)


def _eye(r: int) -> np.ndarray:
    return np.eye(r, dtype=np.int64)


# ---------------------------------------------------------------------------
# Tate cohomology in degrees -1 and 0


def norm_matrix(M: GLattice) -> np.ndarray:
    total = np.zeros((M.rank, M.rank), dtype=np.int64)
    for g in range(M.group.order):
        total = total + M.action(g)
    return total


def tate_h0(M: GLattice) -> FinAb:
    """``M^G / N_G M``."""
    basis = invariants(M)
    k = len(basis)
    if k == 0:
        return FinAb(0)
    L = intmat.to_array(intmat.left_inverse(basis), (k, M.rank))
    image = intmat.imatmul(L, norm_matrix(M))  # columns: norms of basis vectors
    free, tors = intmat.quotient_invariants(intmat.identity(k), intmat.as_rows(image.T), k)
    if free:
        raise VerificationError("norm image has lower rank than the invariants")
    return FinAb.from_orders(tors)


def tate_hminus1(M: GLattice) -> FinAb:
    """``ker N_G / I_G M``."""
    r = M.rank
    if r == 0:
        return FinAb(0)
    ker = intmat.kernel_basis(intmat.as_rows(norm_matrix(M)), r)
    rel = []
    for g in range(M.group.order):
        rel.extend(intmat.as_rows((M.action(g) - _eye(r)).T))
    free, tors = intmat.quotient_invariants(ker, rel, r)
    if free:
        raise VerificationError("augmentation image has lower rank than the norm kernel")
    return FinAb.from_orders(tors)


# ---------------------------------------------------------------------------
# crossed homomorphism route


@dataclass
class CrossedHomData:
    """Relation matrix for crossed homs determined by generator values."""

    lattice: GLattice
    gens: tuple[int, ...]
    value_maps: list[np.ndarray]  # element g -> (r x r*k) matrix giving f(g)
    relations: np.ndarray

    @property
    def nvars(self) -> int:
        return self.lattice.rank * len(self.gens)


def crossed_hom_data(M: GLattice) -> CrossedHomData:
    G = M.group
    r = M.rank
    gens = tuple(G.generators)
    k = len(gens)
    pos = {s: i for i, s in enumerate(gens)}
    nv = r * k

    def E(s):
        e = np.zeros((r, nv), dtype=np.int64)
        i = pos[s]
        e[:, i * r : (i + 1) * r] = _eye(r)
        return e

    Es = {s: E(s) for s in gens}
    A: list[np.ndarray | None] = [None] * G.order
    A[0] = np.zeros((r, nv), dtype=np.int64)
    tree = G.word_tree  # g = s_j * parent, parents first in BFS order
    for g in G.bfs_order[1:]:
        j, parent = tree[g]
        s = gens[j]
        A[g] = Es[s] + intmat.imatmul(M.action(s), A[parent])
    blocks = []
    for s in gens:
        Ms = M.action(s)
        for g in range(G.order):
            blocks.append(A[G.mul(s, g)] - Es[s] - intmat.imatmul(Ms, A[g]))
    R = np.vstack(blocks) if blocks else np.zeros((0, nv), dtype=np.int64)
    return CrossedHomData(M, gens, A, R)


def _coboundary_rows(M: GLattice, gens: Sequence[int]) -> list[list[int]]:
    r = M.rank
    cols = np.vstack([M.action(s) - _eye(r) for s in gens]) if gens else np.zeros((0, r), dtype=np.int64)
    return intmat.as_rows(cols.T)  # each row is the stacked image of a basis vector


def h1(M: GLattice) -> FinAb:
    if M.rank == 0 or not M.group.generators:
        return FinAb(0)
    data = crossed_hom_data(M)
    Z = intmat.kernel_basis(intmat.as_rows(data.relations), data.nvars)
    B = _coboundary_rows(M, data.gens)
    free, tors = intmat.quotient_invariants(Z, B, data.nvars)
    if free:
        raise VerificationError("H^1 of a lattice over a finite group must be finite")
    return FinAb.from_orders(tors)


@dataclass
class H2Data:
    """``H^2`` as ``Z^k / diag(d)`` with cocycle representatives in ``Q/Z`` form."""

    crossed: CrossedHomData
    invariant_factors: list[int]
    generators: list[np.ndarray]  # integer vectors v_i; the class is (1/d_i) v_i


def h2_data(M: GLattice) -> H2Data:
    data = crossed_hom_data(M)
    nv = data.nvars
    if nv == 0:
        return H2Data(data, [], [])
    Hrows = intmat.hnf_basis(intmat.as_rows(data.relations), nv)
    if not Hrows:
        return H2Data(data, [], [])
    _, D, V = intmat.smith(Hrows, nv, want_u=False, want_v=True)
    diag = [D[i][i] for i in range(min(len(D), nv))]
    factors, gens = [], []
    for i, d in enumerate(diag):
        if d > 1:
            factors.append(d)
            gens.append(np.array([V[row][i] for row in range(nv)], dtype=object))
    return H2Data(data, factors, gens)


def h2(M: GLattice) -> FinAb:
    return FinAb.from_orders(h2_data(M).invariant_factors)


def tate(G: FiniteGroup, M: GLattice, n: int, H: Subgroup | None = None) -> FinAb:
    """Tate cohomology ``H^n(H, M)`` for n in {-1, 0, 1, 2} (positive degrees are ordinary)."""
    if n not in SUPPORTED_DEGREES:
        raise DegreeUnsupported(f"degree {n} is not supported")
    if M.group != G:
        raise ValueError("lattice is not defined over the given group")
    _check_cap(G, n)
    N = _over(M, H)
    if n == -1:
        return tate_hminus1(N)
    if n == 0:
        return tate_h0(N)
    if n == 1:
        return h1(N)
    return h2(N)


# ---------------------------------------------------------------------------
# bar complex oracle


def bar_differential(M: GLattice, n: int) -> np.ndarray:
    """Matrix of ``d^n: C^n -> C^{n+1}`` (n in {0, 1}) on inhomogeneous cochains."""
    G = M.group
    r = M.rank
    o = G.order
    if n == 0:
        D = np.zeros((r * o, r), dtype=np.int64)
        for g in range(o):
            D[g * r : (g + 1) * r, :] = M.action(g) - _eye(r)
        return D
    if n == 1:
        D = np.zeros((r * o * o, r * o), dtype=np.int64)
        for g in range(o):
            Mg = M.action(g)
            for h in range(o):
                row = (g * o + h) * r
                D[row : row + r, h * r : (h + 1) * r] += Mg
                gh = G.mul(g, h)
                D[row : row + r, gh * r : (gh + 1) * r] -= _eye(r)
                D[row : row + r, g * r : (g + 1) * r] += _eye(r)
        return D
    raise DegreeUnsupported("bar differentials are provided in degrees 0 and 1")


def bar_cohomology(M: GLattice, n: int) -> FinAb:
    """``H^n(G, M)`` (n in {1, 2}) as the torsion of ``coker d^{n-1}``."""
    if n not in (1, 2):
        raise DegreeUnsupported("the bar oracle covers degrees 1 and 2")
    D = bar_differential(M, n - 1)
    nrows, ncols = D.shape
    if ncols == 0 or nrows == 0:
        return FinAb(0)
    diag = intmat.smith_diagonal(intmat.as_rows(D.T), nrows)
    return FinAb.from_orders([d for d in diag if d > 1])


# ---------------------------------------------------------------------------
# Sha^2_omega


def cyclic_subgroups(G: FiniteGroup) -> list[tuple[int, Subgroup]]:
    """One generator for each distinct cyclic subgroup (smallest element index)."""
    seen = {}
    for g in range(G.order):
        C = closure(G, [g])
        if C not in seen:
            seen[C] = g
    return sorted(((g, C) for C, g in seen.items()), key=lambda e: e[1].key())


@dataclass
class ShaResult:
    group: FinAb
    h2: FinAb
    restriction_rank: int = 0
    kernel_basis: list[list[int]] = field(default_factory=list)


def sha_omega2_data(M: GLattice, cyclic: Sequence[tuple[int, Subgroup]] | None = None) -> ShaResult:
    G = M.group
    r = M.rank
    hd = h2_data(M)
    k = len(hd.invariant_factors)
    if k == 0:
        return ShaResult(FinAb(0), FinAb(0))
    n = G.order
    rows_mod_n: list[list[int]] = []
    for c, _C in cyclic if cyclic is not None else cyclic_subgroups(G):
        if c == 0:
            continue
        Ac = hd.crossed.value_maps[c]
        # z_i = (n/d_i) A_c v_i, the value at c of n times the i-th cocycle
        Z = np.zeros((r, k), dtype=object)
        for i, (d, v) in enumerate(zip(hd.invariant_factors, hd.generators)):
            Z[:, i] = (n // d) * (Ac.astype(object) @ v)
        # left kernel of (M(c) - 1): w with w (M(c) - 1) = 0
        W = intmat.kernel_basis(intmat.as_rows((M.action(c) - _eye(r)).T), r)
        if not W:
            continue
        Wm = np.array(W, dtype=object)
        rows_mod_n.extend(intmat.as_rows(Wm @ Z))
    if not rows_mod_n:
        basis = intmat.identity(k)
    else:
        # solve rows . a = 0 mod n : kernel of [rows | n I] projected to a
        m = len(rows_mod_n)
        big = [list(rows_mod_n[i]) + [n if j == i else 0 for j in range(m)] for i in range(m)]
        K = intmat.kernel_basis(big, k + m)
        basis = intmat.hnf_basis([row[:k] for row in K], k)
    small = [[d if j == i else 0 for j in range(k)] for i, d in enumerate(hd.invariant_factors)]
    free, tors = intmat.quotient_invariants(basis, small, k)
    if free:
        raise VerificationError("Sha computation produced a free part")
    return ShaResult(FinAb.from_orders(tors), FinAb.from_orders(hd.invariant_factors), len(rows_mod_n), basis)


def sha_omega2(G: FiniteGroup, M: GLattice) -> FinAb:
    """Kernel of ``H^2(G, M) -> prod_g H^2(<g>, M)``, computed on cocycles."""
    if M.group != G:
        raise ValueError("lattice is not defined over the given group")
    _check_cap(G, 2)
    return sha_omega2_data(M).group


# ---------------------------------------------------------------------------
# resolutions


def conjugacy_class_reps(G: FiniteGroup) -> list[Subgroup]:
    """Subgroup class representatives (smallest canonical form), ordered by (order, elements)."""
    if G.order > cap("subgroups"):
        raise SizeCap(f"subgroup enumeration capped at order {cap('subgroups')}")
    reps: list[Subgroup] = []
    for H in _all_subgroups_cached(G):
        if not any(K.order == H.order and are_conjugate(G, K, H) is not None for K in reps):
            reps.append(H)
    return sorted(reps, key=lambda H: H.key())


def orbit_sum_image(M: GLattice, K: Subgroup, H: Subgroup, v: np.ndarray) -> list[list[int]]:
    """Images in M of the K-orbit sums of G/H under gH -> g v."""
    G = M.group
    cd = coset_data(G, H)
    seen = set()
    out = []
    for ci, rep in enumerate(cd.reps):
        if ci in seen:
            continue
        orbit = {cd.coset_of[G.mul(k, rep)] for k in K.elements}
        seen |= orbit
        total = np.zeros(M.rank, dtype=object)
        for cj in orbit:
            total = total + M.action(cd.reps[cj]).astype(object) @ v
        out.append([int(x) for x in total])
    return out


def _fixed_image_ok(M: GLattice, K: Subgroup, summands, fixed_rows) -> bool:
    img = []
    for H, v in summands:
        img.extend(orbit_sum_image(M, K, H, v))
    if not fixed_rows:
        return True
    if not img:
        return False
    return intmat.hnf_basis(img, M.rank) == intmat.hnf_basis(fixed_rows, M.rank)


@dataclass
class ResolutionPair:
    """``0 -> U -> R -> M -> 0`` (coflabby) or ``0 -> M -> R -> F -> 0`` (flabby).

    ``summands`` lists the permutation pieces ``(H, v)`` of R; for the
    coflabby kind ``Z[G/H] -> M`` sends ``gH`` to ``g v``.
    """

    kind: str
    source: GLattice
    middle: GLattice
    other: GLattice
    summands: list[tuple[Subgroup, np.ndarray]]
    first_map: np.ndarray  # U -> R  or  M -> R
    second_map: np.ndarray  # R -> M  or  R -> F

    @property
    def coset_labels(self) -> list[str]:
        G = self.source.group
        return [f"Z[G/{subgroup_label(G, H)}]" for H, _ in self.summands]

    def verify(self, check_vanishing: bool = True) -> None:
        A, B = self.first_map, self.second_map
        left = self.other if self.kind == "Coflabby" else self.source
        right = self.source if self.kind == "Coflabby" else self.other
        LatticeHom(left, self.middle, A)
        LatticeHom(self.middle, right, B)
        if intmat.imatmul(B, A).any():
            raise VerificationError("composite of the resolution maps is nonzero")
        r_mid = self.middle.rank
        # exactness: B surjective, A injective with saturated image = ker B
        if right.rank:
            if intmat.smith_diagonal(intmat.as_rows(B.T), right.rank) != [1] * right.rank:
                raise VerificationError("second map is not surjective")
        ker = intmat.hnf_basis(intmat.kernel_basis(intmat.as_rows(B), r_mid), r_mid) if r_mid else []
        img = intmat.hnf_basis(intmat.as_rows(A.T), r_mid) if A.size else []
        if ker != img:
            raise VerificationError("image of the first map differs from the kernel of the second")
        if A.shape[1] != len(img):
            raise VerificationError("first map is not injective")
        if check_vanishing:
            test = self.other if self.kind == "Coflabby" else dual(self.other)
            for K in conjugacy_class_reps(self.source.group):
                if not h1(_over(test, K)).is_zero:
                    raise VerificationError(f"H^1 does not vanish on {K}")


def coflabby_resolution(M: GLattice, prune: bool = True) -> ResolutionPair:
    """Greedy permutation cover ``R -> M`` that is surjective on all fixed parts."""
    G = M.group
    if G.order > cap("subgroups"):
        raise SizeCap("group too large for a coflabby resolution")
    reps = sorted(conjugacy_class_reps(G), key=lambda H: H.key(), reverse=True)
    fixed = {K: invariants(M, K) for K in reps}
    summands: list[tuple[Subgroup, np.ndarray]] = []
    for K in reps:
        for b in fixed[K]:
            if _fixed_image_ok(M, K, summands, fixed[K]):
                break
            img = []
            for H, v in summands:
                img.extend(orbit_sum_image(M, K, H, v))
            if img:
                Hb = intmat.hnf_basis(img, M.rank)
                if intmat.lattice_contains(Hb, intmat.pivots_of(Hb), b):
                    continue
            summands.append((K, np.array(b, dtype=np.int64)))
        if not _fixed_image_ok(M, K, summands, fixed[K]):
            raise VerificationError(f"failed to cover the fixed part of {K}")
    if prune:
        i = len(summands) - 1
        while i >= 0:
            trial = summands[:i] + summands[i + 1 :]
            if all(_fixed_image_ok(M, K, trial, fixed[K]) for K in reps):
                summands = trial
            i -= 1
    parts = [permutation_lattice(G, H) for H, _ in summands]
    R = direct_sum(*parts) if parts else GLattice.trivial(G, 0)
    B = np.zeros((M.rank, R.rank), dtype=np.int64)
    col = 0
    for H, v in summands:
        cd = coset_data(G, H)
        for rep in cd.reps:
            B[:, col] = intmat.imatmul(M.action(rep), v.reshape(-1, 1)).ravel()
            col += 1
    kb = intmat.kernel_basis(intmat.as_rows(B), R.rank) if R.rank else []
    from .lattice import sublattice

    U, A = sublattice(R, kb) if kb else (GLattice.trivial(G, 0), np.zeros((R.rank, 0), dtype=np.int64))
    pair = ResolutionPair("Coflabby", M, R, U, summands, A, B)
    pair.verify()
    return pair


def flabby_resolution(M: GLattice) -> ResolutionPair:
    """Dual of a coflabby resolution of the dual lattice: ``0 -> M -> R -> F -> 0``."""
    co = coflabby_resolution(dual(M))
    R = co.middle  # permutation lattices are self-dual in the coset basis
    if dual(R) != R:
        raise VerificationError("permutation lattice is not self-dual")
    F = dual(co.other)
    first = co.second_map.T.copy()  # M = (M°)° -> R° = R
    second = co.first_map.T.copy()  # R -> U°
    pair = ResolutionPair("Flabby", M, R, F, co.summands, first, second)
    pair.verify()
    return pair


def flabby_class_h1(M: GLattice) -> FinAb:
    """``H^1(G, F)`` for a flabby resolution ``0 -> M -> R -> F -> 0``."""
    return h1(flabby_resolution(M).other)


def cross_check_sha(M: GLattice) -> tuple[FinAb, FinAb]:
    """Both sides of ``Sha^2_omega(G, M) = H^1(G, F)``; raises if they differ."""
    a = sha_omega2(M.group, M)
    b = flabby_class_h1(M)
    if a != b:
        raise VerificationError(f"Sha^2_omega = {a} but H^1(G, F) = {b}")
    return a, b


# ---------------------------------------------------------------------------
# obstruction report


@dataclass
class ObstructionReport:
    group: FiniteGroup
    entries: list[tuple[Subgroup, FinAb]]  # every subgroup with a nonzero Sha
    checked: int

    @property
    def is_empty(self) -> bool:
        return not self.entries

    def to_json(self) -> dict:
        G = self.group
        return {
            "checked_subgroups": self.checked,
            "nonvanishing": [
                {"subgroup": subgroup_label(G, H), "elements": list(H.elements), "sha": A.to_json(), "text": str(A)}
                for H, A in self.entries
            ],
        }


def obstruction_report(G: FiniteGroup, HH, phi=None) -> ObstructionReport:
    """Sha^2_omega of J restricted to every subgroup; nonempty output rules out quasi-invertibility."""
    from .multinorm import build_J

    if G.order > cap("h2"):
        raise SizeCap(f"|G| = {G.order} exceeds the H^2 cap {cap('h2')}")
    J = build_J(G, HH, phi)
    reps = conjugacy_class_reps(G)
    bad = {}
    for K in reps:
        A = sha_omega2_data(_over(J, K)).group
        if not A.is_zero:
            bad[K] = A
    entries = []
    for H in _all_subgroups_cached(G):
        for K, A in bad.items():
            if K.order == H.order and are_conjugate(G, K, H) is not None:
                entries.append((H, A))
                break
    entries.sort(key=lambda e: e[0].key())
    return ObstructionReport(G, entries, len(_all_subgroups_cached(G)))


# ---------------------------------------------------------------------------
# fingerprints


def fingerprint(M: GLattice, degrees: Sequence[int] = (-1, 0, 1), subgroups: Sequence[Subgroup] | None = None) -> dict:
    """Tate groups over each subgroup class representative, keyed by label."""
    G = M.group
    subs = list(subgroups) if subgroups is not None else conjugacy_class_reps(G)
    out = {}
    for K in subs:
        N = _over(M, K)
        row = {}
        for n in degrees:
            row[str(n)] = str(tate(N.group, N, n))
        out[subgroup_label(G, K)] = row
    return out
