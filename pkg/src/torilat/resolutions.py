"""Explicit lattice complexes with machine-checked claims.

Each constructor builds the lattices and maps from their printed images,
then verifies every claim before returning.  A claim that fails raises
:class:`ComplexVerificationError`, which carries the full claim list so
callers can still report what went wrong.

Group-ring notation: a vector in ``Z[G/H]`` is written through
:func:`ring_vector`, which sends a group-ring element ``sum c_g g`` to
``sum c_g gH``.  In ``I`` (a sublattice of ``Z[G/H1] + Z[G/H2]``) the pair
``(x, y)`` means ``x*H1 + y*H2``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import intmat
from .cohomology import conjugacy_class_reps, tate
from .config import cap, raised_caps
from .errors import PreconditionFailed, SizeCap, VerificationError
from .groups import (
    FiniteGroup,
    Subgroup,
    catalog_group,
    closure,
    cyclic,
    dihedral,
    direct_product,
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
    matrix_cokernel,
    permutation_lattice,
    sublattice,
)

__all__ = [
    "Claim",
    "ExplicitComplex",
    "ComplexVerificationError",
    "ring_vector",
    "dihedral_sequence",
    "cm_dihedral_construction",
    "v4_sequence",
    "apt1_complex",
    "apt2_complex",
    "FIXTURES",
    "fixture",
]


# ---------------------------------------------------------------------------
# claims


@dataclass(frozen=True)
class Claim:
    """One checked statement.

    ``level`` is ``"exact"`` when the check decides the statement and
    ``"necessary"`` when it only tests invariants the statement implies
    (ranks and Tate groups over every subgroup class).
    """

    kind: str
    where: str
    expected: str
    observed: str
    holds: bool
    level: str = "exact"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "where": self.where,
            "expected": self.expected,
            "observed": self.observed,
            "holds": self.holds,
            "level": self.level,
        }


class ComplexVerificationError(VerificationError):
    def __init__(self, name: str, claims: Sequence[Claim]):
        bad = [c for c in claims if not c.holds]
        super().__init__(f"{name}: {len(bad)} claim(s) failed: " + "; ".join(f"{c.kind} at {c.where}" for c in bad))
        self.name = name
        self.claims = list(claims)


@dataclass
class ExplicitComplex:
    """``0 -> L0 -> L1 -> ... -> Lk -> 0`` with ``maps[i]: L_i -> L_{i+1}``."""

    name: str
    group: FiniteGroup
    lattices: list[GLattice]
    maps: list[LatticeHom]
    claims: list[Claim] = field(default_factory=list)
    labels: list[str] = field(default_factory=list)
    auxiliary: dict[str, LatticeHom] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.holds for c in self.claims)

    def verify(self) -> None:
        if not self.ok:
            raise ComplexVerificationError(self.name, self.claims)

    def structural_claims(self) -> list[Claim]:
        return structural_claims(self.lattices, self.maps, self.labels)

    def rebased(self, seed: int = 0, steps: int = 6) -> "ExplicitComplex":
        """The same complex after a random unimodular change of basis in every term.

        Only the structural claims (composition, exactness) are carried
        over; they are recomputed in the new bases.
        """
        rng = random.Random(seed)
        changes = [_random_unimodular(L.rank, rng, steps) for L in self.lattices]
        lattices = []
        for L, (P, Pinv) in zip(self.lattices, changes):
            mats = [intmat.imatmul(P, intmat.imatmul(L.action(s), Pinv)) for s in self.group.generators]
            lattices.append(GLattice(self.group, mats, check=True, rank=L.rank))
        maps = []
        for k, f in enumerate(self.maps):
            P_next = changes[k + 1][0]
            Pinv_here = changes[k][1]
            maps.append(LatticeHom(lattices[k], lattices[k + 1], intmat.imatmul(P_next, intmat.imatmul(f.matrix, Pinv_here))))
        out = ExplicitComplex(f"{self.name}/rebased{seed}", self.group, lattices, maps, labels=list(self.labels))
        out.claims = out.structural_claims()
        return out

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "group": self.group.label,
            "group_order": self.group.order,
            "terms": [{"label": lab, "rank": L.rank} for lab, L in zip(self._term_labels(), self.lattices)],
            "claims": [c.to_json() for c in self.claims],
            "ok": self.ok,
            "notes": list(self.notes),
        }

    def _term_labels(self) -> list[str]:
        if len(self.labels) == len(self.lattices):
            return list(self.labels)
        return [f"L{i}" for i in range(len(self.lattices))]


def _random_unimodular(n: int, rng: random.Random, steps: int) -> tuple[np.ndarray, np.ndarray]:
    P = intmat.identity(n)
    for _ in range(steps if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        c = rng.choice((-2, -1, 1, 2))
        for col in range(n):
            P[i][col] += c * P[j][col]
    if n and rng.random() < 0.5:
        k = rng.randrange(n)
        P[k] = [-x for x in P[k]]
    Pinv = intmat.inverse_unimodular(P) if n else []
    return intmat.to_array(P, (n, n)), intmat.to_array(Pinv, (n, n))


# ---------------------------------------------------------------------------
# generic checks


def _rows(A: np.ndarray) -> list[list[int]]:
    return intmat.as_rows(A)


def _kernel_rank(f: LatticeHom) -> int:
    if f.source.rank == 0:
        return 0
    return len(intmat.kernel_basis(_rows(f.matrix), f.source.rank))


def _is_zero(A: np.ndarray) -> bool:
    return not np.any(A)


def exact_at(f_in: LatticeHom | None, f_out: LatticeHom | None) -> tuple[bool, str]:
    """Image of ``f_in`` equals kernel of ``f_out`` (None stands for a zero map)."""
    if f_in is None and f_out is None:
        return True, "no maps"
    if f_in is None:
        k = _kernel_rank(f_out)  # type: ignore[arg-type]
        return k == 0, f"kernel rank {k}"
    if f_out is None:
        coker, _ = matrix_cokernel(f_in.matrix, f_in.target.rank)
        return coker.is_zero, f"cokernel {coker}"
    if not _is_zero(intmat.imatmul(f_out.matrix, f_in.matrix)):
        return False, "composition is nonzero"
    _, img = matrix_cokernel(f_in.matrix, f_in.target.rank)
    k = _kernel_rank(f_out)
    ok = img.saturated and img.rank == k
    return ok, f"image rank {img.rank} (saturated={img.saturated}), kernel rank {k}"


def structural_claims(lattices: Sequence[GLattice], maps: Sequence[LatticeHom], labels: Sequence[str] = ()) -> list[Claim]:
    names = list(labels) if len(labels) == len(lattices) else [f"L{i}" for i in range(len(lattices))]
    out = []
    for k in range(len(maps) - 1):
        prod = intmat.imatmul(maps[k + 1].matrix, maps[k].matrix)
        out.append(Claim("ComposesToZero", f"{names[k]}->{names[k + 2]}", "0", "0" if _is_zero(prod) else "nonzero", _is_zero(prod)))
    for pos in range(len(lattices)):
        f_in = maps[pos - 1] if pos > 0 else None
        f_out = maps[pos] if pos < len(maps) else None
        ok, obs = exact_at(f_in, f_out)
        out.append(Claim("Exact", names[pos], "image = kernel", obs, ok))
    return out


def span_hnf(vectors: Sequence[Sequence[int]], n: int) -> list[list[int]]:
    vecs = [list(map(int, v)) for v in vectors]
    return intmat.hnf_basis(vecs, n) if vecs else []


def same_span(A: Sequence[Sequence[int]], B: Sequence[Sequence[int]], n: int) -> bool:
    return span_hnf(A, n) == span_hnf(B, n)


def orbit_vectors(M: GLattice, v) -> list[list[int]]:
    """The Z-span generators ``g v`` for all g (the G-sublattice generated by v)."""
    v = np.asarray(v, dtype=np.int64)
    return [intmat.as_rows(intmat.imatmul(M.action(g), v.reshape(-1, 1)).reshape(1, -1))[0] for g in range(M.group.order)]


def tate_table(M: GLattice, subgroups: Sequence[Subgroup], degrees: Sequence[int]) -> list[tuple[FinAb, ...]]:
    return [tuple(tate(M.group, M, n, K) for n in degrees) for K in subgroups]


def _add_tables(*tables):
    tables = [t for t in tables if t is not None]
    out = tables[0]
    for t in tables[1:]:
        out = [tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(out, t)]
    return out


def _zero_table(subgroups, degrees):
    return [tuple(FinAb(0) for _ in degrees) for _ in subgroups]


def fingerprint_claim(
    where: str,
    left: Sequence[GLattice],
    right: Sequence[GLattice],
    subgroups: Sequence[Subgroup],
    degrees: Sequence[int] = (-1, 0, 1),
) -> Claim:
    """Rank and Tate groups of two direct sums agree over the given subgroups.

    Tate cohomology is additive, so each sum's table is the sum of its
    summands' tables.
    """
    tl = _add_tables(_zero_table(subgroups, degrees), *[tate_table(M, subgroups, degrees) for M in left])
    tr = _add_tables(_zero_table(subgroups, degrees), *[tate_table(M, subgroups, degrees) for M in right])
    rl = sum(M.rank for M in left)
    rr = sum(M.rank for M in right)
    mismatch = [
        subgroup_label(left[0].group if left else right[0].group, K)
        for K, a, b in zip(subgroups, tl, tr)
        if a != b
    ]
    ok = rl == rr and not mismatch
    obs = f"ranks {rl} vs {rr}; {len(subgroups)} subgroup classes checked"
    if mismatch:
        obs += "; differ at " + ", ".join(mismatch)
    return Claim("FingerprintMatch", where, "isomorphic (stably)", obs, ok, level="necessary")


def coflabby_claim(where: str, M: GLattice, subgroups: Sequence[Subgroup]) -> Claim:
    bad = [subgroup_label(M.group, K) for K in subgroups if not tate(M.group, M, 1, K).is_zero]
    return Claim(
        "Coflabby",
        where,
        "H^1(H, -) = 0 for all H",
        "all vanish" if not bad else "nonzero at " + ", ".join(bad),
        not bad,
    )


def _finab_claim(kind: str, where: str, expected: FinAb, observed: FinAb) -> Claim:
    return Claim(kind, where, str(expected), str(observed), expected == observed)


def _rank_claim(where: str, expected: int, observed: int) -> Claim:
    return Claim("Rank", where, str(expected), str(observed), expected == observed)


# ---------------------------------------------------------------------------
# group-ring helpers


def ring_element(G: FiniteGroup, terms: Sequence[tuple[int, str | int]]) -> dict[int, int]:
    """``[(c, word), ...]`` as a dict element -> coefficient."""
    out: dict[int, int] = {}
    for c, w in terms:
        g = G.word(w) if isinstance(w, str) else int(w)
        out[g] = out.get(g, 0) + c
    return {g: c for g, c in out.items() if c}


def ring_mul(G: FiniteGroup, a: dict[int, int], b: dict[int, int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for g, c in a.items():
        for h, d in b.items():
            k = G.mul(g, h)
            out[k] = out.get(k, 0) + c * d
    return {g: c for g, c in out.items() if c}


def ring_norm(G: FiniteGroup, g: int | str, count: int, step: int = 1) -> dict[int, int]:
    """``1 + x + ... + x^(count-1)`` with ``x = g^step``."""
    x = G.word(g) if isinstance(g, str) else g
    x = G.power(x, step)
    return ring_element(G, [(1, G.power(x, j)) for j in range(count)])


def ring_vector(G: FiniteGroup, H: Subgroup, a: dict[int, int]) -> list[int]:
    cd = coset_data(G, H)
    v = [0] * len(cd.cosets)
    for g, c in a.items():
        v[cd.coset_of[g]] += c
    return v


class Ambient:
    """``Z[G/H1] + ... + Z[G/Hk]`` with the weighted augmentation kernel ``I``."""

    def __init__(self, G: FiniteGroup, subgroups: Sequence[Subgroup], weights: Sequence[int] | None = None):
        self.group = G
        self.subgroups = list(subgroups)
        self.weights = list(weights) if weights is not None else [1] * len(subgroups)
        self.blocks = [permutation_lattice(G, H) for H in subgroups]
        self.offsets = np.cumsum([0] + [B.rank for B in self.blocks]).tolist()
        self.lattice = direct_sum(*self.blocks)
        aug = []
        for B, w in zip(self.blocks, self.weights):
            aug.extend([w] * B.rank)
        basis = intmat.kernel_basis([aug], self.lattice.rank)
        self.I, self.K = sublattice(self.lattice, basis)
        self.L = intmat.to_array(intmat.left_inverse(basis), (len(basis), self.lattice.rank))

    @property
    def rank(self) -> int:
        return self.lattice.rank

    def vector(self, *parts: dict[int, int] | None) -> list[int]:
        v: list[int] = []
        for H, a in zip(self.subgroups, parts):
            v.extend(ring_vector(self.group, H, a or {}))
        return v

    def to_I(self, v) -> np.ndarray:
        """Coordinates in the basis of I of an ambient vector lying in I."""
        v = np.asarray(v, dtype=np.int64).reshape(-1, 1)
        x = intmat.imatmul(self.L, v)
        if not np.array_equal(intmat.imatmul(self.K, x), v):
            raise VerificationError("vector does not lie in I")
        return x.reshape(-1)

    def fixed(self, H: Subgroup) -> list[list[int]]:
        """I^H as ambient row vectors."""
        rows = invariants(self.I, H)
        return [intmat.imatmul(self.K, np.array(r, dtype=np.int64).reshape(-1, 1)).reshape(-1).tolist() for r in rows]


def cyclic_map(G: FiniteGroup, K: Subgroup, target: GLattice, image) -> LatticeHom:
    """``Z[G/K] -> target`` sending the trivial coset to ``image`` (must be K-fixed)."""
    src = permutation_lattice(G, K)
    image = np.asarray(image, dtype=np.int64).reshape(-1, 1)
    cols = [intmat.imatmul(target.action(rep), image).reshape(-1) for rep in coset_data(G, K).reps]
    A = np.stack(cols, axis=1) if cols else np.zeros((target.rank, 0), dtype=np.int64)
    return LatticeHom(src, target, A)


def sum_map(maps: Sequence[LatticeHom]) -> LatticeHom:
    src = direct_sum(*[f.source for f in maps])
    A = np.concatenate([f.matrix for f in maps], axis=1)
    return LatticeHom(src, maps[0].target, A, check=False)


def kernel_lattice(f: LatticeHom) -> tuple[GLattice, LatticeHom, list[list[int]]]:
    basis = intmat.kernel_basis(_rows(f.matrix), f.source.rank)
    K, inc = sublattice(f.source, basis)
    return K, LatticeHom(K, f.source, inc), basis


def _block_support(offsets, blocks_used: Sequence[int]) -> list[int]:
    cols = []
    for b in blocks_used:
        cols.extend(range(offsets[b], offsets[b + 1]))
    return cols


def _finish(cx: ExplicitComplex) -> ExplicitComplex:
    cx.verify()
    return cx


# ---------------------------------------------------------------------------
# dihedral sequence


def dihedral_group(m: int) -> FiniteGroup:
    """D_{2m} in the notation where sigma has order 2m (order 4m)."""
    G = dihedral(2 * m)
    G.label = f"D{2 * m}"
    return G


def dihedral_sequence(m: int) -> ExplicitComplex:
    """``0 -> Z[D/<s>] -> Z[D] + Z -> I -> 0`` for ``H = {<t>, <st>}`` in D of order 4m.

    ``iota(1) = (N_s, -1)``, ``omega(1) = (1, -1)``,
    ``psi(1) = (N_s, -N_s)`` with ``N_s = 1 + s + ... + s^(2m-1)``.
    Dualizing gives the quasi-permutation sequence for J.
    """
    if m < 1:
        raise PreconditionFailed("m must be positive")
    G = dihedral_group(m)
    t = G.word("t")
    s = G.word("s")
    H1, H2 = closure(G, [t]), closure(G, [G.mul(s, t)])
    amb = Ambient(G, [H1, H2])
    I = amb.I
    Ns = ring_norm(G, s, 2 * m)
    one = ring_element(G, [(1, 0)])
    neg = lambda a: {g: -c for g, c in a.items()}  # noqa: E731

    whole, triv, S = G.whole, G.trivial, closure(G, [s])
    ZG = permutation_lattice(G, triv)
    Z = permutation_lattice(G, whole)
    middle = direct_sum(ZG, Z)
    source = permutation_lattice(G, S)

    iota_img = ring_vector(G, triv, Ns) + [-1]
    iota = cyclic_map(G, S, middle, iota_img)
    omega = cyclic_map(G, triv, I, amb.to_I(amb.vector(one, neg(one))))
    psi = cyclic_map(G, whole, I, amb.to_I(amb.vector(Ns, neg(Ns))))
    last = LatticeHom(middle, I, np.concatenate([omega.matrix, psi.matrix], axis=1))

    labels = ["Z[D/<s>]", "Z[D]+Z", "I"]
    cx = ExplicitComplex(f"dihedral:{m}", G, [source, middle, I], [iota, last], labels=labels)
    cx.auxiliary = {"iota": iota, "omega": omega, "psi": psi}
    claims = cx.structural_claims()

    # ker(omega) is the rank-one lattice spanned by (1 - t) N_s
    ker_omega = intmat.kernel_basis(_rows(omega.matrix), omega.source.rank)
    gen = ring_vector(G, triv, ring_mul(G, ring_element(G, [(1, 0), (-1, t)]), Ns))
    claims.append(
        Claim(
            "SublatticeEquals",
            "ker(omega)",
            "Z (1-t)(1+s+...+s^(2m-1))",
            f"rank {len(ker_omega)}",
            same_span(ker_omega, [gen], omega.source.rank),
        )
    )
    # the dual sequence 0 -> J -> Z[D] + Z -> Z[D/<s>] -> 0
    dual_maps = [
        LatticeHom(dual(I), dual(middle), last.matrix.T.copy()),
        LatticeHom(dual(middle), dual(source), iota.matrix.T.copy()),
    ]
    for c in structural_claims([dual(I), dual(middle), dual(source)], dual_maps, ["J", "Z[D]+Z", "Z[D/<s>]"]):
        claims.append(Claim(c.kind, "dual:" + c.where, c.expected, c.observed, c.holds))
    cx.claims = claims
    cx.auxiliary["dual_first"] = dual_maps[0]
    cx.auxiliary["dual_second"] = dual_maps[1]
    if m == 1:
        cx.notes.append("m = 1 is the Klein-four case; the same printed formulas are used")
    return _finish(cx)


# ---------------------------------------------------------------------------
# C_m x D_{2^nu}


def cm_dihedral_group(m: int, nu: int) -> FiniteGroup:
    """C_m x D_{2^nu} with generators r (order m), s (order 2^nu), t."""
    D = dihedral(2**nu)
    if m == 1:
        D.label = f"D{2**nu}"
        return D
    G = direct_product([cyclic(m), D], label=f"C{m}xD{2**nu}", names=["r", "s", "t"])
    return G


@dataclass
class CmDihedralData:
    """The named pieces of the C_m x D_{2^nu} construction."""

    group: FiniteGroup
    ambient: Ambient
    summands: list[tuple[str, Subgroup]]
    maps: dict[str, LatticeHom]
    phi_star: LatticeHom
    phi: LatticeHom


def _cm_dihedral_maps(m: int, nu: int) -> CmDihedralData:
    G = cm_dihedral_group(m, nu)
    r, s, t = G.word("r"), G.word("s"), G.word("t")
    st = G.mul(s, t)
    H1, H2 = closure(G, [t]), closure(G, [st])
    amb = Ambient(G, [H1, H2])
    I = amb.I
    el = lambda *terms: ring_element(G, terms)  # noqa: E731
    neg = lambda a: {g: -c for g, c in a.items()}  # noqa: E731
    N_r = ring_norm(G, r, m)
    N_s = ring_norm(G, s, 2**nu)
    N_rs = ring_mul(G, N_r, N_s)

    summands: list[tuple[str, Subgroup]] = []
    maps: dict[str, LatticeHom] = {}

    def add(name, K, first, second):
        summands.append((name, K))
        maps[name] = cyclic_map(G, K, I, amb.to_I(amb.vector(first, second)))

    add("R0", closure(G, [r]), N_r, neg(N_r))
    add("R1", G.whole, N_rs, neg(N_rs))
    add("R2", closure(G, [t]), el((1, 0), (1, r)), neg(el((1, 0), (1, G.inv(s)))))
    for i in range(nu):
        step = 2 ** (nu - i)
        K = closure(G, [G.power(s, step), st])
        Ni = ring_norm(G, s, 2**i, step)
        shift = G.mul(r, G.power(s, 2 ** (nu - i - 1)))
        add(f"R'{i}", K, {}, ring_mul(G, Ni, el((1, 0), (-1, shift))))
    star = ["R0", "R1", "R2", "R'0"]
    phi_star = sum_map([maps[k] for k in star])
    phi = sum_map([maps[k] for k, _ in summands])
    return CmDihedralData(G, amb, summands, maps, phi_star, phi)


def cm_dihedral_construction(m: int, nu: int) -> ExplicitComplex:
    """Coflabby resolution ``0 -> U -> R -> I -> 0`` for ``H = {<t>, <st>}`` in C_m x D_{2^nu}.

    Checks: coker of the partial sum ``Phi_*`` is ``(Z/m)^(2^(nu-1)-1)``,
    the full sum is onto, U is coflabby, ``U cap R_*`` is fixed by C_m and
    matches ``Z[G/<r,s>] + Z[G/<r,t>] + Z[G/<r,st>]``, ``U`` is generated by
    ``U cap R_*`` and its ``Z_nu``-fixed part, and ``U + S`` matches
    ``(U cap R_*) + S' + S`` on every subgroup class.
    """
    if m < 1 or m % 2 == 0:
        raise PreconditionFailed("m must be an odd positive integer")
    if nu < 1:
        raise PreconditionFailed("nu must be positive")
    limit = cap("nlqp")
    if m * 2**nu > limit:
        raise SizeCap(f"m * 2^nu = {m * 2**nu} exceeds the nlqp cap {limit}")
    if m == 1:
        cx = dihedral_sequence(2 ** (nu - 1))
        cx.name = f"nlqp:1:{nu}"
        cx.notes.append(f"m = 1 delegates to the dihedral sequence for D{2**nu}")
        return cx
    order = 2 * m * 2**nu
    with raised_caps(subgroups=order, cohomology=order):
        return _cm_dihedral_checked(m, nu)


def _cm_dihedral_checked(m: int, nu: int) -> ExplicitComplex:
    data = _cm_dihedral_maps(m, nu)
    G, I = data.group, data.ambient.I
    r, s, t = G.word("r"), G.word("s"), G.word("t")
    st = G.mul(s, t)
    claims: list[Claim] = []

    coker, _ = matrix_cokernel(data.phi_star.matrix, I.rank)
    expected = FinAb.from_orders([m] * (2 ** (nu - 1) - 1))
    claims.append(_finab_claim("CokernelEquals", "Phi_*", expected, coker))

    R = data.phi.source
    U, inc, _ = kernel_lattice(data.phi)
    cx = ExplicitComplex(f"nlqp:{m}:{nu}", G, [U, R, I], [inc, data.phi], labels=["U", "R", "I"])
    cx.auxiliary = dict(data.maps)
    cx.auxiliary["Phi_*"] = data.phi_star
    cx.auxiliary["Phi"] = data.phi
    claims = cx.structural_claims() + claims
    claims.append(_rank_claim("U", R.rank - I.rank, U.rank))

    subs = conjugacy_class_reps(G)
    claims.append(coflabby_claim("U", U, subs))

    # U cap R_* is the kernel of Phi_*; R_* occupies the first four blocks
    Ustar, inc_star, ker_star = kernel_lattice(data.phi_star)
    claims.append(_rank_claim("U cap R_*", 2 ** (nu + 1) + 2, Ustar.rank))
    fixed_by_cm = np.array_equal(Ustar.action(r), np.eye(Ustar.rank, dtype=np.int64))
    claims.append(Claim("FixedBy", "U cap R_*", "C_m acts trivially", "trivial" if fixed_by_cm else "nontrivial", fixed_by_cm))
    perm_model = [
        permutation_lattice(G, closure(G, [r, s])),
        permutation_lattice(G, closure(G, [r, t])),
        permutation_lattice(G, closure(G, [r, st])),
    ]
    claims.append(fingerprint_claim("U cap R_* vs Z[G/<r,s>]+Z[G/<r,t>]+Z[G/<r,st>]", [Ustar], perm_model, subs))

    # U = (U cap R_*) + U^{Z_nu}; both sides as sublattices of R
    Z_nu = closure(G, [G.power(s, 2 ** (nu - 1))])
    star_rank = data.phi_star.source.rank
    star_in_R = [list(v) + [0] * (R.rank - star_rank) for v in ker_star]
    U_cols = intmat.as_rows(inc.matrix.T)
    fixed_rows = invariants(U, Z_nu)
    fixed_in_R = [intmat.imatmul(inc.matrix, np.array(v, dtype=np.int64).reshape(-1, 1)).reshape(-1).tolist() for v in fixed_rows]
    claims.append(
        Claim(
            "SublatticeEquals",
            "U",
            "(U cap R_*) + U^{Z_nu}",
            f"rank U {U.rank}, rank U^Z {len(fixed_rows)}",
            same_span(U_cols, star_in_R + fixed_in_R, R.rank),
        )
    )

    # U + S vs (U cap R_*) + S' + S
    S = [permutation_lattice(G, closure(G, [r, G.power(s, 2 ** (nu - i)), st])) for i in range(1, nu)]
    Sp = [permutation_lattice(G, closure(G, [G.power(s, 2 ** (nu - i)), st])) for i in range(1, nu)]
    claims.append(fingerprint_claim("U+S vs (U cap R_*)+S'+S", [U] + S, [Ustar] + Sp + S, subs))
    claims.append(fingerprint_claim("U vs permutation", [U], perm_model + Sp, subs))

    cx.claims = claims
    cx.notes.append("R'_i is read as Z[G/<s^(2^(nu-i)), st>]")
    cx.notes.append("stable isomorphisms are checked through ranks and Tate groups of degrees -1, 0, 1 on all subgroup classes")
    return _finish(cx)


# ---------------------------------------------------------------------------
# Klein four


def v4_sequence() -> ExplicitComplex:
    """``0 -> Z^2 -> Z[G/<s>] + Z[G/<t>] + Z[G/<st>] -> I^(phi) -> 0`` for G = C2 x C2,
    ``H = {1, G}`` with weights 1 and 2."""
    G = catalog_group("C2xC2")
    s, t = G.word("s"), G.word("t")
    st = G.mul(s, t)
    amb = Ambient(G, [G.trivial, G.whole], [1, 2])
    I = amb.I
    el = lambda *terms: ring_element(G, terms)  # noqa: E731
    Ks = [closure(G, [s]), closure(G, [t]), closure(G, [st])]
    fs = [cyclic_map(G, K, I, amb.to_I(amb.vector(el((1, 0), (1, g)), el((-1, 0))))) for K, g in zip(Ks, (s, t, st))]
    f = sum_map(fs)
    R = f.source

    def rvec(*parts):
        v = []
        for K, a in zip(Ks, parts):
            v.extend(ring_vector(G, K, a or {}))
        return v

    k1 = rvec(el((1, 0), (1, t)), el((-1, 0), (-1, s)), None)
    k2 = rvec(None, el((1, 0), (1, s)), el((-1, 0), (-1, s)))
    Z2 = GLattice.trivial(G, 2)
    kmap = LatticeHom(Z2, R, np.array([k1, k2], dtype=np.int64).T)
    cx = ExplicitComplex("v4", G, [Z2, R, I], [kmap, f], labels=["Z^2", "R", "I^(phi)"])
    claims = cx.structural_claims()
    claims.append(_rank_claim("kernel", 2, _kernel_rank(f)))
    claims.append(Claim("TrivialAction", "Z^2", "trivial", "trivial", True))
    cx.claims = claims
    cx.auxiliary = {"f1": fs[0], "f2": fs[1], "f3": fs[2]}
    return _finish(cx)


# ---------------------------------------------------------------------------
# (C2)^3 with {<r>, <s,t>}


def _fixed_equals(amb: Ambient, H: Subgroup, gens: Sequence[Sequence[int]]) -> bool:
    return same_span(amb.fixed(H), gens, amb.rank)


def _h0_exponent_claim(where: str, M: GLattice, bound: int) -> Claim:
    h = tate(M.group, M, 0)
    e = h.exponent or 1
    return Claim("ExponentDivides", where, f"exponent | {bound}", f"{h} (exponent {e})", bound % e == 0)


def apt1_complex() -> ExplicitComplex:
    """Coflabby resolution of I for G = (C2)^3 and ``H = {<r>, <s,t>}``."""
    G = catalog_group("C2xC2xC2")
    r, s, t = G.word("r"), G.word("s"), G.word("t")
    st = G.mul(s, t)
    H1, H2 = closure(G, [r]), closure(G, [s, t])
    amb = Ambient(G, [H1, H2])
    I = amb.I
    el = lambda *terms: ring_element(G, terms)  # noqa: E731
    one_plus_r = el((1, 0), (1, r))

    pieces = []
    for g in (s, t, st):
        K = closure(G, [r, g])
        pieces.append(cyclic_map(G, K, I, amb.to_I(amb.vector(el((1, 0), (1, g)), {k: -c for k, c in one_plus_r.items()}))))
    fprime = sum_map(pieces)
    f1 = cyclic_map(G, G.trivial, I, amb.to_I(amb.vector(el((1, 0)), el((-1, 0)))))
    f2 = cyclic_map(G, closure(G, [s, t]), I, amb.to_I(amb.vector({}, el((1, 0), (-1, r)))))
    f = sum_map(pieces + [f1, f2])
    R = f.source
    U, inc, _ = kernel_lattice(f)
    cx = ExplicitComplex("apt1", G, [U, R, I], [inc, f], labels=["U", "R", "I"])
    cx.auxiliary = {"f'": fprime, "f1": f1, "f2": f2}
    claims = cx.structural_claims()
    subs = conjugacy_class_reps(G)
    claims.append(coflabby_claim("U", U, subs))
    claims.append(_rank_claim("U", 11, U.rank))

    # image of f' is I^<r>
    img = intmat.as_rows(intmat.imatmul(amb.K, fprime.matrix).T)
    claims.append(Claim("SublatticeEquals", "f'(R')", "I^<r>", f"rank {len(amb.fixed(H1))}", same_span(img, amb.fixed(H1), amb.rank)))
    v = amb.vector({}, el((1, 0), (-1, r)))
    for g in (s, t, st):
        gname = G.name(g)
        both = amb.fixed(closure(G, [r, g]))
        claims.append(
            Claim(
                "SublatticeEquals",
                f"I^<{gname}>",
                f"I^<r,{gname}> + Z(0, 1-r)",
                "",
                _fixed_equals(amb, closure(G, [g]), both + [v]),
            )
        )
        rg = G.mul(r, g)
        claims.append(
            Claim("SublatticeEquals", f"I^<{G.name(rg)}>", f"I^<r,{gname}>", "", _fixed_equals(amb, closure(G, [rg]), both))
        )
    gen = amb.vector(el((1, 0)), el((-1, 0)))
    claims.append(
        Claim("SublatticeEquals", "I", "G-span of (1, -1)", "", same_span(orbit_vectors(amb.lattice, gen), amb.fixed(G.trivial), amb.rank))
    )
    claims.append(_finab_claim("TateGroup", "H^-1(G, I)", FinAb(0), tate(G, I, -1)))
    claims.append(_finab_claim("TateGroup", "H^0(G, R)", FinAb.from_orders([4, 4, 4, 4]), tate(G, R, 0)))
    claims.append(_h0_exponent_claim("H^0(G, U)", U, 4))
    cx.claims = claims
    cx.notes.append("the second fixed-part equality is read with <r g> on the left")
    return _finish(cx)


# ---------------------------------------------------------------------------
# C4 x C2 with {<s>, <t>}


def apt2_complex() -> ExplicitComplex:
    """Coflabby resolution of I for G = C4 x C2 and ``H = {<s>, <t>}``."""
    G = catalog_group("C4xC2")
    s, t = G.word("s"), G.word("t")
    s2 = G.power(s, 2)
    H1, H2 = closure(G, [s]), closure(G, [t])
    amb = Ambient(G, [H1, H2])
    I = amb.I
    el = lambda *terms: ring_element(G, terms)  # noqa: E731

    one_minus_t = el((1, 0), (-1, t))
    one_plus_t = el((1, 0), (1, t))
    one_minus_s = el((1, 0), (-1, s))
    one_plus_s2 = el((1, 0), (1, s2))
    N4 = ring_norm(G, s, 4)
    V = amb.vector
    mul = lambda a, b: ring_mul(G, a, b)  # noqa: E731
    neg = lambda a: {g: -c for g, c in a.items()}  # noqa: E731
    x_s = el((1, s))
    x_s2 = el((1, s2))

    a = V(one_minus_t, {})
    b = V(one_plus_t, neg(one_plus_s2))
    c = V(one_plus_t, neg(mul(x_s, one_plus_s2)))
    d = V({k: 2 * v for k, v in one_plus_t.items()}, neg(N4))
    listed = {
        "I": (G.trivial, [a, V({}, one_minus_s), V({}, mul(x_s, one_minus_s)), V({}, mul(x_s2, one_minus_s)), V(el((1, 0)), el((-1, 0)))]),
        "I^<s^2>": (closure(G, [s2]), [a, b, c]),
        "I^<t>": (closure(G, [t]), [V({}, one_minus_s), V({}, mul(x_s, one_minus_s)), V({}, mul(x_s2, one_minus_s)), b]),
        "I^<s^2t>": (closure(G, [G.mul(s2, t)]), [b, c]),
        "I^<s^2,t>": (closure(G, [s2, t]), [b, c]),
        "I^<s>": (closure(G, [s]), [a, d]),
        "I^<st>": (closure(G, [G.mul(s, t)]), [d]),
        "I^G": (G.whole, [d]),
    }
    claims: list[Claim] = []
    for where, (H, gens) in listed.items():
        claims.append(Claim("SublatticeEquals", where, "printed generators", "", _fixed_equals(amb, H, gens)))
    claims.append(
        Claim(
            "SublatticeEquals",
            "I^<s^2,t>",
            "Z[G/<s^2,t>] (1+t, -(1+s^2))",
            "",
            same_span(orbit_vectors(amb.lattice, b), amb.fixed(closure(G, [s2, t])), amb.rank),
        )
    )

    f1 = cyclic_map(G, G.trivial, I, amb.to_I(V(el((1, 0)), el((-1, 0)))))
    f2 = cyclic_map(G, closure(G, [t]), I, amb.to_I(V({}, one_minus_s)))
    f3 = cyclic_map(G, closure(G, [s2, t]), I, amb.to_I(b))
    f4 = cyclic_map(G, closure(G, [s]), I, amb.to_I(a))
    f = sum_map([f1, f2, f3, f4])
    R = f.source
    U, inc, _ = kernel_lattice(f)
    cx = ExplicitComplex("apt2", G, [U, R, I], [inc, f], labels=["U", "R", "I"])
    cx.auxiliary = {"f1": f1, "f2": f2, "f3": f3, "f4": f4}
    subs = conjugacy_class_reps(G)
    claims = cx.structural_claims() + claims
    claims.append(coflabby_claim("U", U, subs))
    claims.append(_rank_claim("U", 11, U.rank))
    claims.append(_rank_claim("U^G", 3, len(invariants(U))))

    K = closure(G, [G.mul(s2, t)])
    fixed_rows = invariants(U, K)
    UK, _ = sublattice(U, fixed_rows)
    model = [permutation_lattice(G, K), permutation_lattice(G, closure(G, [s2, t])), permutation_lattice(G, G.whole)]
    claims.append(fingerprint_claim("U^<s^2t> vs Z[G/<s^2t>]+Z[G/<s^2,t>]+Z", [UK], model, subs))
    claims.append(_finab_claim("TateGroup", "H^-1(G, I)", FinAb(0), tate(G, I, -1)))
    claims.append(_finab_claim("TateGroup", "H^0(G, R)", FinAb.from_orders([2, 4, 4]), tate(G, R, 0)))
    claims.append(_h0_exponent_claim("H^0(G, U)", U, 4))
    cx.claims = claims
    return _finish(cx)


# ---------------------------------------------------------------------------
# fixture names


FIXTURES: dict[str, Callable[..., ExplicitComplex]] = {
    "dihedral": dihedral_sequence,
    "nlqp": cm_dihedral_construction,
    "v4": v4_sequence,
    "apt1": apt1_complex,
    "apt2": apt2_complex,
}


def fixture(spec: str) -> ExplicitComplex:
    """Build a fixture from ``dihedral:m``, ``nlqp:m:nu``, ``v4``, ``apt1`` or ``apt2``."""
    parts = spec.strip().split(":")
    name, args = parts[0], parts[1:]
    if name not in FIXTURES:
        raise PreconditionFailed(f"unknown fixture {name!r}; expected one of {sorted(FIXTURES)}")
    expected_args = {"dihedral": 1, "nlqp": 2}.get(name, 0)
    if len(args) != expected_args:
        raise PreconditionFailed(f"fixture {name} takes {expected_args} integer argument(s)")
    try:
        ints = [int(a) for a in args]
    except ValueError as exc:
        raise PreconditionFailed(f"fixture arguments must be integers: {spec!r}") from exc
    return FIXTURES[name](*ints)
