"""G-lattices: integer matrix representations of finite groups.

A :class:`GLattice` stores one matrix per group generator and derives the
matrix of every other element along the group's word tree (memoised).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from . import intmat
from .errors import NotNormal, VerificationError
from .groups import (
    FiniteGroup,
    QuotientMap,
    Subgroup,
    is_normal,
    left_cosets,
    quotient,
    subgroup_as_group,
)


@dataclass(frozen=True)
class FinAb:
    """Finitely generated abelian group ``Z^free_rank + Z/d1 + ... + Z/dk``."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        t = tuple(int(d) for d in self.torsion if int(d) > 1)
        for a, b in zip(t, t[1:]):
            if b % a:
                raise ValueError(f"torsion not in divisibility order: {t}")
        object.__setattr__(self, "torsion", t)

    @classmethod
    def from_orders(cls, orders, free_rank: int = 0) -> "FinAb":
        """Normalise an arbitrary list of cyclic orders into invariant factors."""
        orders = [int(d) for d in orders if int(d) > 1]
        if not orders:
            return cls(free_rank, ())
        diag = intmat.smith_diagonal([[d if i == j else 0 for j in range(len(orders))] for i, d in enumerate(orders)], len(orders))
        return cls(free_rank, tuple(d for d in diag if d > 1))

    @property
    def is_zero(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def order(self) -> int | None:
        if self.free_rank:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    @property
    def exponent(self) -> int | None:
        if self.free_rank:
            return None
        return self.torsion[-1] if self.torsion else 1

    def __add__(self, other: "FinAb") -> "FinAb":
        return FinAb.from_orders(list(self.torsion) + list(other.torsion), self.free_rank + other.free_rank)

    def __str__(self) -> str:
        parts = []
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        parts += [f"Z/{d}" for d in self.torsion]
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}

    @classmethod
    def parse(cls, text: str) -> "FinAb":
        text = text.strip()
        if text == "0":
            return cls()
        free, tors = 0, []
        for part in text.split("+"):
            part = part.strip()
            if part == "Z":
                free += 1
            elif part.startswith("Z^"):
                free += int(part[2:])
            elif part.startswith("Z/"):
                tors.append(int(part[2:]))
            else:
                raise ValueError(f"cannot parse abelian group: {text!r}")
        return cls.from_orders(tors, free)


def _as_matrix(m, r: int) -> np.ndarray:
    a = np.asarray(m)
    if a.dtype == object:
        a = intmat.to_array(intmat.as_rows(a)) if a.size else np.zeros((r, r), dtype=np.int64)
    else:
        a = a.astype(np.int64, copy=False)
    return a.reshape(r, r)


class GLattice:
    """A G-lattice given by the matrices of the group's generators."""

    def __init__(
        self,
        group: FiniteGroup,
        generator_matrices,
        labels: Sequence[str] | None = None,
        check: bool = True,
        rank: int | None = None,
    ):
        self.group = group
        if isinstance(generator_matrices, dict):
            mats = [generator_matrices[g] for g in group.generators]
        else:
            mats = list(generator_matrices)
        if len(mats) != len(group.generators):
            raise ValueError("need one matrix per group generator")
        if mats:
            r = int(np.asarray(mats[0]).shape[0])
        elif rank is not None:
            r = rank  # a trivial group has no generator matrices to read the rank from
        else:
            r = len(labels) if labels is not None else 0
        self.rank = r
        self._gens = tuple(_as_matrix(m, r) for m in mats)
        self.labels = tuple(labels) if labels is not None else None
        self._memo: dict[int, np.ndarray] = {0: np.eye(r, dtype=np.int64)}
        self._lock = threading.Lock()
        if check:
            self.check()

    @classmethod
    def trivial(cls, G: FiniteGroup, rank: int = 1) -> "GLattice":
        eye = np.eye(rank, dtype=np.int64)
        return cls(G, [eye] * len(G.generators), labels=[f"e{i}" for i in range(rank)], check=False, rank=rank)

    @classmethod
    def from_element_matrices(cls, G: FiniteGroup, mats, labels=None, check=True) -> "GLattice":
        return cls(G, [mats[g] for g in G.generators], labels=labels, check=check)

    # -- actions -------------------------------------------------------
    @property
    def generator_matrices(self) -> dict[int, np.ndarray]:
        return dict(zip(self.group.generators, self._gens))

    def action(self, g: int) -> np.ndarray:
        hit = self._memo.get(g)
        if hit is not None:
            return hit
        with self._lock:
            tree = self.group.word_tree
            path = []
            x = g
            while x not in self._memo:
                j, p = tree[x]
                path.append((x, j))
                x = p
            for x, j in reversed(path):
                self._memo[x] = intmat.imatmul(self._gens[j], self._memo[tree[x][1]])
            return self._memo[g]

    def matrices(self) -> list[np.ndarray]:
        return [self.action(g) for g in range(self.group.order)]

    def check(self) -> None:
        G = self.group
        for j, s in enumerate(G.generators):
            Ms = self._gens[j]
            for g in range(G.order):
                if not np.array_equal(intmat.imatmul(Ms, self.action(g)), self.action(G.mul(s, g))):
                    raise VerificationError(f"not a homomorphism at generator {s}, element {g}")

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GLattice)
            and self.group == other.group
            and self.rank == other.rank
            and all(np.array_equal(a, b) for a, b in zip(self._gens, other._gens))
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"GLattice(rank={self.rank}, group={self.group!r})"

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "generators": {f"g{g}": self.action(g).tolist() for g in self.group.generators},
        }

    @classmethod
    def from_json(cls, G: FiniteGroup, data: dict) -> "GLattice":
        r = int(data["rank"])
        given = {int(k.lstrip("g")): np.array(v, dtype=np.int64).reshape(r, r) for k, v in data["generators"].items()}
        # build from whatever generating set was supplied, then re-express
        gens = sorted(given)
        from .groups import closure

        if closure(G, gens).order != G.order:
            raise VerificationError("supplied matrices do not cover a generating set")
        memo = {0: np.eye(r, dtype=np.int64)}
        queue = [0]
        for x in queue:
            for s in gens:
                y = G.mul(s, x)
                if y not in memo:
                    memo[y] = intmat.imatmul(given[s], memo[x])
                    queue.append(y)
        for s in gens:
            for x in range(G.order):
                if not np.array_equal(intmat.imatmul(given[s], memo[x]), memo[G.mul(s, x)]):
                    raise VerificationError("matrices do not define a homomorphism")
        return cls(G, [memo[g] for g in G.generators])


class LatticeHom:
    """Equivariant map ``source -> target`` given by a (target.rank x source.rank) matrix."""

    def __init__(self, source: GLattice, target: GLattice, matrix, check: bool = True):
        if source.group != target.group:
            raise ValueError("source and target must be lattices over the same group")
        self.source = source
        self.target = target
        a = np.asarray(matrix)
        if a.dtype != object:
            a = a.astype(np.int64)
        self.matrix = a.reshape(target.rank, source.rank)
        if check:
            self.check()

    def check(self) -> None:
        for g in self.source.group.generators:
            lhs = intmat.imatmul(self.matrix, self.source.action(g))
            rhs = intmat.imatmul(self.target.action(g), self.matrix)
            if not np.array_equal(lhs, rhs):
                raise VerificationError(f"map is not equivariant at generator {g}")

    def compose(self, other: "LatticeHom") -> "LatticeHom":
        """self o other"""
        return LatticeHom(other.source, self.target, intmat.imatmul(self.matrix, other.matrix), check=False)

    def to_json(self) -> dict:
        return {"matrix": self.matrix.tolist()}


# ---------------------------------------------------------------------------
# constructors


@dataclass(frozen=True)
class CosetData:
    cosets: tuple[tuple[int, ...], ...]
    coset_of: tuple[int, ...]

    @property
    def reps(self) -> list[int]:
        return [c[0] for c in self.cosets]


_COSET_CACHE: dict = {}


def coset_data(G: FiniteGroup, H: Subgroup) -> CosetData:
    key = (id(G), G.order, H.elements)
    hit = _COSET_CACHE.get(key)
    if hit is not None and hit[0] is G:
        return hit[1]
    cosets = left_cosets(G, H)
    coset_of = [0] * G.order
    for i, c in enumerate(cosets):
        for x in c:
            coset_of[x] = i
    data = CosetData(tuple(cosets), tuple(coset_of))
    if len(_COSET_CACHE) > 4096:
        _COSET_CACHE.clear()
    _COSET_CACHE[key] = (G, data)
    return data


def permutation_matrix_on_cosets(G: FiniteGroup, H: Subgroup, g: int) -> np.ndarray:
    cd = coset_data(G, H)
    n = len(cd.cosets)
    P = np.zeros((n, n), dtype=np.int64)
    for i, rep in enumerate(cd.reps):
        P[cd.coset_of[G.mul(g, rep)], i] = 1
    return P


def permutation_lattice(G: FiniteGroup, H: Subgroup) -> GLattice:
    """Z[G/H] with left cosets ordered by their minimal element."""
    cd = coset_data(G, H)
    mats = [permutation_matrix_on_cosets(G, H, s) for s in G.generators]
    labels = [f"{G.name(rep)}H" for rep in cd.reps]
    return GLattice(G, mats, labels=labels, check=False, rank=len(cd.reps))


def direct_sum(*lattices: GLattice) -> GLattice:
    if not lattices:
        raise ValueError("direct_sum needs at least one summand")
    G = lattices[0].group
    r = sum(M.rank for M in lattices)
    mats = []
    for j in range(len(G.generators)):
        B = np.zeros((r, r), dtype=np.int64)
        off = 0
        for M in lattices:
            B[off : off + M.rank, off : off + M.rank] = M._gens[j]
            off += M.rank
        mats.append(B)
    labels = None
    if all(M.labels is not None for M in lattices):
        labels = [f"{k}:{lab}" for k, M in enumerate(lattices) for lab in M.labels]  # type: ignore[union-attr]
    return GLattice(G, mats, labels=labels, check=False, rank=r)


def dual(M: GLattice) -> GLattice:
    """M° with g acting by the transpose of M(g^{-1})."""
    G = M.group
    mats = [np.ascontiguousarray(M.action(G.inv(s)).T) for s in G.generators]
    return GLattice(G, mats, labels=M.labels, check=False, rank=M.rank)


def restrict(M: GLattice, P: Subgroup) -> GLattice:
    """M as a lattice over P (P reindexed as a standalone group)."""
    emb = subgroup_as_group(M.group, P)
    mats = [M.action(emb.to_parent[g]) for g in emb.group.generators]
    return GLattice(emb.group, mats, labels=M.labels, check=False, rank=M.rank)


def inflate(M: GLattice, qmap: QuotientMap) -> GLattice:
    """View a G/N-lattice as a G-lattice through the projection."""
    G = qmap.source
    mats = [M.action(qmap.projection[s]) for s in G.generators]
    return GLattice(G, mats, labels=M.labels, check=False, rank=M.rank)


def sublattice(M: GLattice, basis_cols, check: bool = True) -> tuple[GLattice, np.ndarray]:
    """The G-stable saturated sublattice spanned by the given columns.

    Returns the lattice (in the given basis) and the inclusion matrix.
    """
    K = intmat.to_array(intmat.as_rows(basis_cols)).T if len(basis_cols) else np.zeros((M.rank, 0), dtype=np.int64)
    K = K.reshape(M.rank, -1)
    k = K.shape[1]
    if k == 0:
        return GLattice(M.group, [np.zeros((0, 0), dtype=np.int64)] * len(M.group.generators), labels=[]), K
    L = intmat.to_array(intmat.left_inverse(basis_cols), (k, M.rank))
    mats = []
    for g in M.group.generators:
        A = intmat.imatmul(M.action(g), K)
        X = intmat.imatmul(L, A)
        if check and not np.array_equal(intmat.imatmul(K, X), A):
            raise VerificationError("sublattice is not G-stable")
        mats.append(X)
    return GLattice(M.group, mats, check=False, rank=k), K


def _invariant_basis(M: GLattice, elements: Sequence[int]) -> list[list[int]]:
    r = M.rank
    rows: list[list[int]] = []
    for g in elements:
        D = M.action(g) - np.eye(r, dtype=np.int64)
        rows.extend(intmat.as_rows(D))
    if not rows:
        return intmat.identity(r)
    return intmat.kernel_basis(rows, r)


def invariants(M: GLattice, H: Subgroup | None = None) -> list[list[int]]:
    """Canonical basis (rows) of the fixed vectors of H (default: all of G)."""
    if H is None:
        gens = list(M.group.generators)
    else:
        emb = subgroup_as_group(M.group, H)
        gens = [emb.to_parent[g] for g in emb.group.generators]
    return _invariant_basis(M, gens)


def fixed_part(M: GLattice, N: Subgroup) -> tuple[GLattice, LatticeHom, QuotientMap]:
    """M^N as a G/N-lattice, its embedding into M, and the quotient map."""
    G = M.group
    if not is_normal(G, N):
        raise NotNormal(f"{N} is not normal")
    q = quotient(G, N)
    basis = invariants(M, N)
    k = len(basis)
    K = intmat.to_array(basis, (k, M.rank)).T if k else np.zeros((M.rank, 0), dtype=np.int64)
    Q = q.target
    if k:
        L = intmat.to_array(intmat.left_inverse(basis), (k, M.rank))
        mats = []
        for qs in Q.generators:
            g = q.representatives[qs]
            mats.append(intmat.imatmul(L, intmat.imatmul(M.action(g), K)))
    else:
        mats = [np.zeros((0, 0), dtype=np.int64)] * len(Q.generators)
    F = GLattice(Q, mats, check=True, rank=k)
    emb = LatticeHom(inflate(F, q), M, K)
    return F, emb, q


def cofixed_part(M: GLattice, N: Subgroup) -> GLattice:
    """M^[N] = ((M°)^N)° as a G/N-lattice."""
    F, _, _ = fixed_part(dual(M), N)
    return dual(F)


def hom_kernel(f: LatticeHom) -> tuple[GLattice, LatticeHom]:
    basis = intmat.kernel_basis(intmat.as_rows(f.matrix), f.source.rank)
    K, inc = sublattice(f.source, basis)
    return K, LatticeHom(K, f.source, inc)


@dataclass(frozen=True)
class ImageData:
    rank: int
    cokernel: FinAb
    saturated: bool  # image equals its saturation


def hom_image_cokernel(f: LatticeHom) -> tuple[FinAb, ImageData]:
    return matrix_cokernel(f.matrix, f.target.rank)


def matrix_cokernel(A, nrows: int) -> tuple[FinAb, ImageData]:
    rows = intmat.as_rows(A)
    ncols = len(rows[0]) if rows else 0
    if ncols == 0:
        fa = FinAb(nrows)
        return fa, ImageData(0, fa, True)
    diag = intmat.smith_diagonal(rows, ncols)
    fa = FinAb(nrows - len(diag), tuple(d for d in diag if d > 1))
    return fa, ImageData(len(diag), fa, all(d == 1 for d in diag))


def smith_normal_form(A):
    """``(U, D, V)`` with ``U A V = D`` (object arrays of Python ints)."""
    rows = intmat.as_rows(A)
    m = len(rows)
    n = len(rows[0]) if rows else 0
    U, D, V = intmat.smith(rows, n)
    return (
        np.array(U, dtype=object).reshape(m, m),
        np.array(D, dtype=object).reshape(m, n),
        np.array(V, dtype=object).reshape(n, n),
    )


def is_equivariant(A: np.ndarray, source: GLattice, target: GLattice) -> bool:
    try:
        LatticeHom(source, target, A)
    except VerificationError:
        return False
    return True
