"""Character lattices of multinorm one tori and their reduction calculus.

A pair ``(HH, phi)`` of a subgroup multiset and a weight function defines
the ambient permutation lattice ``A = sum_{H,i} Z[G/H]`` (one block per
weight entry) together with the weighted augmentation ``f: A -> Z``.  The
lattice ``I`` is ``ker f`` and ``J`` is its dual.

Every reduction rule is certified by an *ambient isomorphism*: an
equivariant unimodular matrix ``T: A -> A' + S`` (``S`` a sum of coset
lattices split off) with ``(f', 0) T = f``.  Such a ``T`` restricts to an
isomorphism ``I = I' + S``, which is materialised and checked as well.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import intmat
from .errors import EmptyMultiset, NotNormal, PreconditionFailed, VerificationError
from .groups import (
    FiniteGroup,
    Subgroup,
    are_conjugate,
    conjugate,
    double_coset_reps,
    index,
    intersection,
    is_normal,
    join,
    normal_core,
    quotient,
    subgroup_as_group,
    subgroup_label,
)
from .lattice import (
    GLattice,
    LatticeHom,
    coset_data,
    direct_sum,
    dual,
    fixed_part,
    permutation_lattice,
    restrict,
)

RULES = ("RDED", "RDRD", "CONJ", "RDSR", "RDTR", "RDMN", "QUOT", "RESTRICT")


# ---------------------------------------------------------------------------
# multisets and weights


@dataclass(frozen=True)
class SubgroupMultiset:
    """Subgroups with multiplicities, kept in canonical (order, elements) order."""

    entries: tuple[tuple[Subgroup, int], ...]

    def __post_init__(self):
        merged: dict[Subgroup, int] = {}
        for H, m in self.entries:
            if m < 1:
                raise ValueError("multiplicities must be positive")
            merged[H] = merged.get(H, 0) + int(m)
        object.__setattr__(self, "entries", tuple(sorted(merged.items(), key=lambda e: e[0].key())))

    @classmethod
    def of(cls, subgroups: Iterable[Subgroup]) -> "SubgroupMultiset":
        return cls(tuple((H, 1) for H in subgroups))

    @property
    def set(self) -> tuple[Subgroup, ...]:
        return tuple(H for H, _ in self.entries)

    def multiplicity(self, H: Subgroup) -> int:
        for K, m in self.entries:
            if K == H:
                return m
        return 0

    def __len__(self) -> int:
        return sum(m for _, m in self.entries)

    def __iter__(self):
        for H, m in self.entries:
            for _ in range(m):
                yield H

    def __contains__(self, H) -> bool:
        return self.multiplicity(H) > 0

    @property
    def is_set(self) -> bool:
        return all(m == 1 for _, m in self.entries)

    def reduced(self) -> tuple[Subgroup, ...]:
        """Maximal members (the reduced view)."""
        S = self.set
        return tuple(H for H in S if not any(H != K and H.issubset(K) for K in S))

    def is_reduced(self) -> bool:
        return self.is_set and len(self.reduced()) == len(self.set)

    def is_strongly_reduced(self, G: FiniteGroup) -> bool:
        return self.is_set and is_strongly_reduced(G, self.set)

    def strongly_reduced(self, G: FiniteGroup) -> tuple[Subgroup, ...]:
        return srd_choice(G, self.set)

    def normal_members(self, G: FiniteGroup) -> tuple[Subgroup, ...]:
        return tuple(H for H in self.set if is_normal(G, H))

    def core(self, G: FiniteGroup) -> Subgroup:
        return normal_core(G, self.set)

    def mu(self, G: FiniteGroup) -> int:
        return min(index(G, H) for H in self.set)

    def big_m(self, G: FiniteGroup) -> int:
        return max(index(G, H) for H in self.set)

    def contained_in(self, P: Subgroup) -> "SubgroupMultiset":
        return SubgroupMultiset(tuple((H, m) for H, m in self.entries if H.issubset(P)))

    def to_json(self, G: FiniteGroup | None = None) -> list[dict]:
        out = []
        for H, m in self.entries:
            d = {"subgroup": list(H.elements), "multiplicity": m}
            if G is not None:
                d["label"] = subgroup_label(G, H)
            out.append(d)
        return out


@dataclass(frozen=True)
class WeightFunction:
    """Map from the underlying set to nondecreasing positive tuples."""

    values: tuple[tuple[Subgroup, tuple[int, ...]], ...]

    def __post_init__(self):
        vals = []
        for H, w in self.values:
            w = tuple(sorted(int(x) for x in w))
            if not w or any(x < 1 for x in w):
                raise ValueError("weights must be nonempty tuples of positive integers")
            vals.append((H, w))
        vals.sort(key=lambda e: e[0].key())
        for a, b in zip(vals, vals[1:]):
            if a[0] == b[0]:
                raise ValueError("duplicate subgroup in weight function")
        object.__setattr__(self, "values", tuple(vals))

    @classmethod
    def unit(cls, HH: SubgroupMultiset) -> "WeightFunction":
        return cls(tuple((H, (1,) * m) for H, m in HH.entries))

    @classmethod
    def from_mapping(cls, mapping: Mapping[Subgroup, Sequence[int]]) -> "WeightFunction":
        return cls(tuple((H, tuple(w)) for H, w in mapping.items()))

    def __getitem__(self, H: Subgroup) -> tuple[int, ...]:
        for K, w in self.values:
            if K == H:
                return w
        raise KeyError(H)

    def d(self, H: Subgroup) -> int:
        return intmat.gcd_list(self[H])

    def d_phi(self) -> "WeightFunction":
        return WeightFunction(tuple((H, (intmat.gcd_list(w),)) for H, w in self.values))

    def content(self) -> int:
        return intmat.gcd_list(x for _, w in self.values for x in w)

    @property
    def is_normalized(self) -> bool:
        return self.content() == 1

    def normalized(self) -> "WeightFunction":
        c = self.content()
        if c <= 1:
            return self
        return WeightFunction(tuple((H, tuple(x // c for x in w)) for H, w in self.values))

    @property
    def is_unit(self) -> bool:
        return all(x == 1 for _, w in self.values for x in w)

    def matches(self, HH: SubgroupMultiset) -> bool:
        return [(H, len(w)) for H, w in self.values] == list(HH.entries)

    def to_json(self) -> list[list[int]]:
        return [list(w) for _, w in self.values]


@dataclass(frozen=True)
class MultinormData:
    """A multiset together with a weight function; one tuple per subgroup."""

    entries: tuple[tuple[Subgroup, tuple[int, ...]], ...]

    def __post_init__(self):
        merged: dict[Subgroup, list[int]] = {}
        for H, w in self.entries:
            merged.setdefault(H, []).extend(int(x) for x in w)
        ent = []
        for H, w in merged.items():
            if not w or any(x < 1 for x in w):
                raise ValueError("weights must be positive")
            ent.append((H, tuple(sorted(w))))
        ent.sort(key=lambda e: e[0].key())
        object.__setattr__(self, "entries", tuple(ent))

    @classmethod
    def make(cls, HH, phi=None) -> "MultinormData":
        if isinstance(HH, MultinormData):
            return HH
        if not isinstance(HH, SubgroupMultiset):
            HH = SubgroupMultiset.of(HH)
        if phi is None:
            phi = WeightFunction.unit(HH)
        elif not isinstance(phi, WeightFunction):
            phi = WeightFunction.from_mapping(phi)
        if not phi.matches(HH):
            raise ValueError("weight tuple lengths must match multiplicities")
        return cls(phi.values)

    @classmethod
    def unit(cls, subgroups: Iterable[Subgroup]) -> "MultinormData":
        return cls.make(SubgroupMultiset.of(subgroups))

    @property
    def multiset(self) -> SubgroupMultiset:
        return SubgroupMultiset(tuple((H, len(w)) for H, w in self.entries))

    @property
    def weights(self) -> WeightFunction:
        return WeightFunction(self.entries)

    @property
    def set(self) -> tuple[Subgroup, ...]:
        return tuple(H for H, _ in self.entries)

    def weight(self, H: Subgroup) -> tuple[int, ...]:
        for K, w in self.entries:
            if K == H:
                return w
        return ()

    @property
    def is_unit(self) -> bool:
        return all(x == 1 for _, w in self.entries for x in w)

    def content(self) -> int:
        return intmat.gcd_list(x for _, w in self.entries for x in w)

    def normalized(self) -> "MultinormData":
        c = self.content()
        if c <= 1:
            return self
        return MultinormData(tuple((H, tuple(x // c for x in w)) for H, w in self.entries))

    def blocks(self) -> list[tuple[Subgroup, int, int]]:
        """(subgroup, position within its tuple, weight) in canonical order."""
        return [(H, i, x) for H, w in self.entries for i, x in enumerate(w)]

    def without(self, H: Subgroup, i: int) -> "MultinormData":
        out = []
        for K, w in self.entries:
            if K == H:
                w = w[:i] + w[i + 1 :]
                if not w:
                    continue
            out.append((K, w))
        return MultinormData(tuple(out))

    def plus(self, H: Subgroup, weights: Sequence[int]) -> "MultinormData":
        return MultinormData(self.entries + ((H, tuple(weights)),))

    def to_json(self, G: FiniteGroup | None = None) -> list[dict]:
        out = []
        for H, w in self.entries:
            d = {"subgroup": list(H.elements), "multiplicity": len(w), "weights": list(w)}
            if G is not None:
                d["label"] = subgroup_label(G, H)
            out.append(d)
        return out

    def describe(self, G: FiniteGroup) -> str:
        parts = []
        for H, w in self.entries:
            lab = subgroup_label(G, H)
            if all(x == 1 for x in w):
                parts.append(lab if len(w) == 1 else f"{lab}x{len(w)}")
            else:
                parts.append(f"{lab}:{','.join(map(str, w))}")
        return "{" + ", ".join(parts) + "}"


def multiset_from_json(G: FiniteGroup, data: Sequence[Mapping]) -> MultinormData:
    from .groups import closure

    entries = []
    for item in data:
        elems = [int(x) for x in item["subgroup"]]
        H = closure(G, elems)  # accepts generators or the full element list
        m = int(item.get("multiplicity", len(item.get("weights", [1]))))
        w = item.get("weights")
        if w is None:
            w = [1] * m
        if len(w) != m:
            raise ValueError("weights length must equal multiplicity")
        entries.append((H, tuple(int(x) for x in w)))
    if not entries:
        raise EmptyMultiset("empty multiset")
    return MultinormData(tuple(entries))


def is_strongly_reduced(G: FiniteGroup, S: Sequence[Subgroup]) -> bool:
    for H in S:
        for K in S:
            if H == K:
                continue
            for g in range(G.order):
                if H.issubset(conjugate(G, K, g)):
                    return False
    return True


def _subconjugate(G: FiniteGroup, H: Subgroup, K: Subgroup) -> int | None:
    """Smallest g with g H g^-1 contained in K, if any."""
    if H.order > K.order or K.order % H.order:
        return None
    for g in range(G.order):
        if conjugate(G, H, g).issubset(K):
            return g
    return None


def srd_choice(G: FiniteGroup, S: Sequence[Subgroup]) -> tuple[Subgroup, ...]:
    """Deterministic strongly reduced subset.

    Members are grouped into conjugacy classes; only classes that are maximal
    for subconjugacy are kept (so every member is subconjugate to a chosen
    one), and each kept class is represented by its smallest canonical form.
    """
    S = sorted(set(S), key=lambda H: H.key())
    classes: list[list[Subgroup]] = []
    for H in S:
        for cl in classes:
            if are_conjugate(G, cl[0], H) is not None:
                cl.append(H)
                break
        else:
            classes.append([H])
    keep = []
    for cl in classes:
        rep = cl[0]
        dominated = any(
            other is not cl and other[0].order > rep.order and _subconjugate(G, rep, other[0]) is not None
            for other in classes
        )
        if not dominated:
            keep.append(min(cl, key=lambda H: H.key()))
    return tuple(sorted(keep, key=lambda H: H.key()))


# ---------------------------------------------------------------------------
# ambient permutation lattice


def _pmat_cache_key(G, H):
    return (id(G), H.elements)


class Ambient:
    """``sum Z[G/H]`` over the blocks of a :class:`MultinormData`."""

    def __init__(self, G: FiniteGroup, data: MultinormData, extra: Sequence[Subgroup] = ()):
        self.group = G
        self.data = data
        self.blocks = data.blocks()
        self.extra = tuple(extra)
        self.sizes = [index(G, H) for H, _, _ in self.blocks] + [index(G, H) for H in self.extra]
        self.offsets = [0]
        for s in self.sizes:
            self.offsets.append(self.offsets[-1] + s)
        self.rank = self.offsets[-1]
        self.main_rank = self.offsets[len(self.blocks)]

    def block_slice(self, b: int) -> slice:
        return slice(self.offsets[b], self.offsets[b + 1])

    def extra_slice(self, k: int) -> slice:
        return self.block_slice(len(self.blocks) + k)

    @cached_property
    def lattice(self) -> GLattice:
        parts = [permutation_lattice(self.group, H) for H, _, _ in self.blocks]
        parts += [permutation_lattice(self.group, H) for H in self.extra]
        if not parts:
            return GLattice(self.group, [np.zeros((0, 0), dtype=np.int64)] * len(self.group.generators))
        return direct_sum(*parts)

    @cached_property
    def augmentation(self) -> np.ndarray:
        f = np.zeros((1, self.rank), dtype=np.int64)
        for b, (_, _, w) in enumerate(self.blocks):
            f[0, self.block_slice(b)] = w
        return f

    def find_block(self, H: Subgroup, i: int) -> int:
        for b, (K, j, _) in enumerate(self.blocks):
            if K == H and j == i:
                return b
        raise KeyError((H, i))

    def blocks_of(self, H: Subgroup) -> list[int]:
        return [b for b, (K, _, _) in enumerate(self.blocks) if K == H]


@dataclass
class KernelData:
    ambient: Ambient
    basis: np.ndarray  # ambient.rank x rank(I), columns
    lattice: GLattice
    left_inverse: np.ndarray


_I_CACHE: dict = {}


def _kernel_data(G: FiniteGroup, data: MultinormData) -> KernelData:
    key = (id(G), data)
    hit = _I_CACHE.get(key)
    if hit is not None and hit[0] is G:
        return hit[1]
    amb = Ambient(G, data)
    rows = intmat.kernel_basis(intmat.as_rows(amb.augmentation), amb.rank)
    k = len(rows)
    K = intmat.to_array(rows, (k, amb.rank)).T if k else np.zeros((amb.rank, 0), dtype=np.int64)
    K = np.ascontiguousarray(K)
    if k:
        L = intmat.to_array(intmat.left_inverse(rows), (k, amb.rank))
    else:
        L = np.zeros((0, amb.rank), dtype=np.int64)
    mats = []
    for s in G.generators:
        mats.append(intmat.imatmul(L, intmat.imatmul(amb.lattice.action(s), K)))
    I = GLattice(G, mats, check=False, rank=k)
    kd = KernelData(amb, K, I, L)
    if len(_I_CACHE) > 512:
        _I_CACHE.clear()
    _I_CACHE[key] = (G, kd)
    return kd


def _coerce(HH, phi) -> MultinormData:
    data = MultinormData.make(HH, phi)
    if not data.entries:
        raise EmptyMultiset("the multiset is empty")
    return data


def build_I(G: FiniteGroup, HH, phi=None) -> GLattice:
    """Kernel of the weighted augmentation, in its canonical primitive basis."""
    return _kernel_data(G, _coerce(HH, phi)).lattice


def build_J(G: FiniteGroup, HH, phi=None) -> GLattice:
    data = _coerce(HH, phi)
    return dual(_kernel_data(G, data.normalized()).lattice)


def ambient_basis(G: FiniteGroup, HH, phi=None) -> np.ndarray:
    """Columns: the canonical basis of I inside the ambient permutation lattice."""
    return _kernel_data(G, _coerce(HH, phi)).basis


# ---------------------------------------------------------------------------
# elementary coset maps


def projection_matrix(G: FiniteGroup, H: Subgroup, Hp: Subgroup) -> np.ndarray:
    """Ind epsilon: Z[G/H] -> Z[G/H'] (gH -> gH') for H inside H'."""
    src = coset_data(G, H)
    dst = coset_data(G, Hp)
    P = np.zeros((len(dst.cosets), len(src.cosets)), dtype=np.int64)
    for j, rep in enumerate(src.reps):
        P[dst.coset_of[rep], j] = 1
    return P


def transfer_matrix(G: FiniteGroup, H: Subgroup, Hp: Subgroup) -> np.ndarray:
    """Ind epsilon°: Z[G/H] -> Z[G/H'] (gH -> sum of the H'-cosets inside gH) for H' inside H."""
    return projection_matrix(G, Hp, H).T.copy()


def translation_matrix(G: FiniteGroup, H: Subgroup, g: int) -> np.ndarray:
    """Z[G/H] -> Z[G/gHg^-1], xH -> x g^-1 (gHg^-1)."""
    K = conjugate(G, H, g)
    src = coset_data(G, H)
    dst = coset_data(G, K)
    gi = G.inv(g)
    P = np.zeros((len(dst.cosets), len(src.cosets)), dtype=np.int64)
    for j, rep in enumerate(src.reps):
        P[dst.coset_of[G.mul(rep, gi)], j] = 1
    return P


def _unimodular_with_first_row(v: Sequence[int]) -> list[list[int]]:
    """Unimodular W whose first row is the primitive vector v."""
    m = len(v)
    U, D, V = intmat.smith([list(v)], m)
    # U [v] V = [1 0 ... 0]  =>  v = U^-1 e1 V^-1
    s = U[0][0]
    Vinv = intmat.inverse_unimodular(V)
    W = [[s * x for x in row] if i == 0 else list(row) for i, row in enumerate(Vinv)]
    if W[0] != [int(x) for x in v]:
        raise VerificationError("failed to complete a primitive vector to a basis")
    return W


def _bezout(values: Sequence[int]) -> list[int]:
    """Coefficients c with sum c_i v_i = gcd(v)."""
    coeffs = [0] * len(values)
    if not values:
        return coeffs
    g = values[0]
    coeffs[0] = 1
    for i in range(1, len(values)):
        d, a, b = intmat.xgcd(g, values[i])
        coeffs = [a * c for c in coeffs]
        coeffs[i] = b
        g = d
    return coeffs


# ---------------------------------------------------------------------------
# trace steps


@dataclass
class TraceStep:
    """One certified rewrite ``I_source = I_target + sum Z[G/H]``.

    When ``reverse`` is set the certificate goes the other way
    (``I_target = I_source + sum Z[G/H]``): the step enlarges the multiset.
    """

    rule: str
    primitive: str
    group: FiniteGroup
    source: MultinormData
    target: MultinormData
    split_off: tuple[Subgroup, ...]
    certificate: np.ndarray
    reverse: bool = False
    target_group: FiniteGroup | None = None
    conjugator: int | None = None
    normal_subgroup: Subgroup | None = None
    subgroup: Subgroup | None = None
    notes: dict = field(default_factory=dict)

    @property
    def codomain_group(self) -> FiniteGroup:
        return self.target_group or self.group

    @property
    def certified_source(self) -> MultinormData:
        return self.target if self.reverse else self.source

    @property
    def certified_target(self) -> MultinormData:
        return self.source if self.reverse else self.target

    def verify(self) -> None:
        if self.primitive in ("RDED", "RDTR", "RDRD", "CONJ"):
            _verify_ambient_iso(self.group, self.certified_source, self.certified_target, self.split_off, self.certificate)
            lattice_isomorphism(self)
        elif self.primitive == "QUOT":
            _verify_quotient_step(self)
        elif self.primitive == "RESTRICT":
            _verify_restrict_step(self)
        else:
            raise VerificationError(f"unknown primitive {self.primitive}")

    def to_json(self, with_matrices: bool = True) -> dict:
        G = self.group
        out = {
            "rule": self.rule,
            "primitive": self.primitive,
            "reverse": self.reverse,
            "inputs": self.source.to_json(G),
            "outputs": self.target.to_json(self.codomain_group),
            "split_off": [subgroup_label(G, H) for H in self.split_off],
        }
        if self.conjugator is not None:
            out["conjugator"] = G.name(self.conjugator)
        if self.normal_subgroup is not None:
            out["normal_subgroup"] = subgroup_label(G, self.normal_subgroup)
        if self.subgroup is not None:
            out["subgroup"] = subgroup_label(G, self.subgroup)
        if self.notes:
            out["notes"] = self.notes
        if with_matrices:
            out["certificate"] = np.asarray(self.certificate).tolist()
        return out


def _equivariant(T: np.ndarray, src: GLattice, dst: GLattice) -> bool:
    for s in src.group.generators:
        if not np.array_equal(intmat.imatmul(T, src.action(s)), intmat.imatmul(dst.action(s), T)):
            return False
    return True


def _is_unimodular(T: np.ndarray) -> bool:
    n, m = T.shape
    if n != m:
        return False
    if n == 0:
        return True
    diag = intmat.smith_diagonal(intmat.as_rows(T), n)
    return len(diag) == n and all(d == 1 for d in diag)


def _verify_ambient_iso(G, src: MultinormData, dst: MultinormData, split, T) -> None:
    A = Ambient(G, src)
    B = Ambient(G, dst, extra=split)
    T = np.asarray(T)
    if T.shape != (B.rank, A.rank):
        raise VerificationError(f"certificate has shape {T.shape}, expected {(B.rank, A.rank)}")
    if not _equivariant(T, A.lattice, B.lattice):
        raise VerificationError("certificate is not equivariant")
    if not _is_unimodular(T):
        raise VerificationError("certificate is not invertible over the integers")
    lhs = intmat.imatmul(B.augmentation[:, : B.main_rank], T[: B.main_rank, :])
    if not np.array_equal(lhs, A.augmentation):
        raise VerificationError("certificate does not intertwine the augmentations")


def lattice_isomorphism(step: TraceStep) -> np.ndarray:
    """The induced isomorphism ``I_src -> I_dst + S`` (checked)."""
    G = step.group
    src, dst = step.certified_source, step.certified_target
    kd_src = _kernel_data(G, src)
    kd_dst = _kernel_data(G, dst)
    T = np.asarray(step.certificate)
    r_dst = kd_dst.ambient.rank
    top = intmat.imatmul(kd_dst.left_inverse, intmat.imatmul(T[:r_dst, :], kd_src.basis))
    bottom = intmat.imatmul(T[r_dst:, :], kd_src.basis)
    # the top block must land in I_dst exactly
    if not np.array_equal(intmat.imatmul(kd_dst.basis, top), intmat.imatmul(T[:r_dst, :], kd_src.basis)):
        raise VerificationError("certificate does not map I into I'")
    Psi = np.vstack([top, bottom]) if bottom.size else top
    codomain = direct_sum(kd_dst.lattice, *[permutation_lattice(G, H) for H in step.split_off]) if step.split_off else kd_dst.lattice
    if not _equivariant(Psi, kd_src.lattice, codomain) or not _is_unimodular(Psi):
        raise VerificationError("induced lattice map is not an isomorphism")
    return Psi


def _make_certificate(G, src: MultinormData, dst: MultinormData, split: Sequence[Subgroup], pieces) -> np.ndarray:
    A = Ambient(G, src)
    B = Ambient(G, dst, extra=split)
    T = np.zeros((B.rank, A.rank), dtype=np.int64)
    for (kind, bi), sb, M in pieces:
        rs = B.block_slice(bi) if kind == "b" else B.extra_slice(bi)
        T[rs, A.block_slice(sb)] += M
    return T


def _identity_pieces(A: Ambient, B: Ambient, mapping: Mapping[int, int]):
    """Identity blocks: dst block -> src block."""
    pieces = []
    for db, sb in mapping.items():
        n = A.sizes[sb]
        pieces.append((("b", db), sb, np.eye(n, dtype=np.int64)))
    return pieces


def _match_blocks(src: MultinormData, dst: MultinormData, skip: Sequence[tuple[Subgroup, int]] = (), partial: bool = False) -> dict[int, int]:
    """Pair up dst blocks with src blocks (same subgroup and weight) in order."""
    A = src.blocks()
    skipset = set(skip)
    pool: dict = {}
    for b, (H, i, w) in enumerate(A):
        if (H, i) in skipset:
            continue
        pool.setdefault((H, w), []).append(b)
    mapping = {}
    for db, (H, _, w) in enumerate(dst.blocks()):
        lst = pool.get((H, w))
        if not lst:
            if partial:
                continue
            raise VerificationError("target block has no partner in the source")
        mapping[db] = lst.pop(0)
    return mapping


# ---------------------------------------------------------------------------
# primitive rules


def _check_member(data: MultinormData, H: Subgroup, i: int) -> int:
    w = data.weight(H)
    if not w:
        raise PreconditionFailed(f"{H} is not a member of the multiset")
    if not 0 <= i < len(w):
        raise PreconditionFailed(f"weight index {i} out of range for {H}")
    return w[i]


def rded_step(G: FiniteGroup, data: MultinormData, H0: Subgroup, i0: int, H0p: Subgroup, i0p: int, rule: str = "RDED") -> TraceStep:
    """Split Z[G/H0] off using a containing member H0' (0-based weight indices)."""
    w0 = _check_member(data, H0, i0)
    w0p = _check_member(data, H0p, i0p)
    if not H0.issubset(H0p):
        raise PreconditionFailed(f"{H0} is not contained in {H0p}")
    if H0 == H0p and i0 == i0p:
        raise PreconditionFailed("an entry cannot absorb itself")
    if w0 % w0p:
        raise PreconditionFailed(f"weight {w0} is not divisible by {w0p}")
    dst = data.without(H0, i0)
    A = Ambient(G, data)
    B = Ambient(G, dst, extra=(H0,))
    sb = A.find_block(H0, i0)
    recv_src = A.find_block(H0p, i0p)
    mapping = _match_blocks(data, dst, skip=[(H0, i0)])
    inv = {v: k for k, v in mapping.items()}
    pieces = _identity_pieces(A, B, mapping)
    pieces.append((("b", inv[recv_src]), sb, (w0 // w0p) * projection_matrix(G, H0, H0p)))
    pieces.append((("x", 0), sb, np.eye(A.sizes[sb], dtype=np.int64)))
    T = _make_certificate(G, data, dst, (H0,), pieces)
    return TraceStep(rule, "RDED", G, data, dst, (H0,), T, notes={"ratio": w0 // w0p})


def rdtr_step(G: FiniteGroup, data: MultinormData, H0: Subgroup, i0: int, H0p: Subgroup, rule: str = "RDTR") -> TraceStep:
    """Split Z[G/H0] off by transferring entry i0 of H0 into a member H0' inside H0.

    The receiving blocks are those of H0' that remain after removal; their
    weight gcd ``d`` must satisfy ``phi(H0)_i0 in (H0:H0') d Z``.
    """
    w0 = _check_member(data, H0, i0)
    if not H0p.issubset(H0):
        raise PreconditionFailed(f"{H0p} is not contained in {H0}")
    dst = data.without(H0, i0)
    recv_w = dst.weight(H0p)
    if not recv_w:
        raise PreconditionFailed(f"{H0p} has no remaining weight entry to receive the transfer")
    d = intmat.gcd_list(recv_w)
    idx = H0.order // H0p.order
    if w0 % (idx * d):
        raise PreconditionFailed(f"weight {w0} is not divisible by (H0:H0') d = {idx * d}")
    q = w0 // (idx * d)
    coeffs = _bezout(list(recv_w))
    A = Ambient(G, data)
    B = Ambient(G, dst, extra=(H0,))
    sb = A.find_block(H0, i0)
    mapping = _match_blocks(data, dst, skip=[(H0, i0)])
    pieces = _identity_pieces(A, B, mapping)
    tr = transfer_matrix(G, H0, H0p)
    for j, c in enumerate(coeffs):
        if c:
            pieces.append((("b", B.find_block(H0p, j)), sb, (c * q) * tr))
    pieces.append((("x", 0), sb, np.eye(A.sizes[sb], dtype=np.int64)))
    T = _make_certificate(G, data, dst, (H0,), pieces)
    return TraceStep(rule, "RDTR", G, data, dst, (H0,), T, notes={"quotient": q, "bezout": coeffs})


def collapse_step(G: FiniteGroup, data: MultinormData, H: Subgroup, rule: str = "RDRD") -> TraceStep:
    """Replace the weights of H by their gcd, splitting off m-1 copies of Z[G/H]."""
    w = data.weight(H)
    m = len(w)
    if m < 2:
        raise PreconditionFailed(f"{H} has multiplicity {m}")
    d = intmat.gcd_list(w)
    W = _unimodular_with_first_row([x // d for x in w])
    dst = MultinormData(tuple((K, (d,) if K == H else v) for K, v in data.entries))
    split = (H,) * (m - 1)
    A = Ambient(G, data)
    B = Ambient(G, dst, extra=split)
    src_blocks = A.blocks_of(H)
    mapping = _match_blocks(data, dst, skip=[(H, i) for i in range(m)], partial=True)
    pieces = _identity_pieces(A, B, mapping)
    n = index(G, H)
    eye = np.eye(n, dtype=np.int64)
    newb = B.find_block(H, 0)
    for r in range(m):
        for c in range(m):
            if W[r][c]:
                dest = ("b", newb) if r == 0 else ("x", r - 1)
                pieces.append((dest, src_blocks[c], W[r][c] * eye))
    T = _make_certificate(G, data, dst, split, pieces)
    return TraceStep(rule, "RDRD", G, data, dst, split, T, notes={"gcd": d})


def conj_step(G: FiniteGroup, data: MultinormData, H0: Subgroup, g: int, i0: int = 0, rule: str = "CONJ") -> TraceStep:
    w0 = _check_member(data, H0, i0)
    H1 = conjugate(G, H0, g)
    dst = data.without(H0, i0).plus(H1, (w0,))
    A = Ambient(G, data)
    B = Ambient(G, dst)
    sb = A.find_block(H0, i0)
    mapping = _match_blocks(data, dst, skip=[(H0, i0)], partial=True)
    # the new block of H1 is the one left unmatched
    free = [b for b in range(len(B.blocks)) if b not in mapping]
    pieces = _identity_pieces(A, B, mapping)
    pieces.append((("b", free[0]), sb, translation_matrix(G, H0, g)))
    T = _make_certificate(G, data, dst, (), pieces)
    return TraceStep(rule, "CONJ", G, data, dst, (), T, conjugator=g)


# ---------------------------------------------------------------------------
# traces


@dataclass
class ReductionTrace:
    group: FiniteGroup
    start: MultinormData
    steps: list[TraceStep] = field(default_factory=list)

    @property
    def end(self) -> MultinormData:
        return self.steps[-1].target if self.steps else self.start

    @property
    def end_group(self) -> FiniteGroup:
        return self.steps[-1].codomain_group if self.steps else self.group

    def append(self, step: TraceStep) -> None:
        if step.source != self.end or step.group != self.end_group:
            raise VerificationError("trace step does not continue the trace")
        self.steps.append(step)

    def extend(self, other: "ReductionTrace") -> None:
        for s in other.steps:
            self.append(s)

    def verify(self) -> None:
        cur, grp = self.start, self.group
        for s in self.steps:
            if s.source != cur or s.group != grp:
                raise VerificationError("trace is not contiguous")
            s.verify()
            cur, grp = s.target, s.codomain_group

    def split_summands(self) -> tuple[list[Subgroup], list[Subgroup]]:
        """Permutation summands added on the source side and on the target side."""
        left, right = [], []
        for s in self.steps:
            (left if s.reverse else right).extend(s.split_off)
        return left, right

    def replay(self) -> "ChainCertificate":
        """Compose all same-group steps into one explicit isomorphism.

        Produces ``Psi: I_start + L -> I_end + R`` with ``L``, ``R`` sums of
        coset lattices and checks that it intertwines the actions.
        """
        G = self.group
        if any(s.codomain_group != G for s in self.steps):
            raise VerificationError("replay only composes steps over a single group")
        cur_I = _kernel_data(G, self.start).lattice
        Psi = np.eye(cur_I.rank, dtype=np.int64)
        left: list[Subgroup] = []
        right: list[Subgroup] = []
        for s in self.steps:
            step_iso = lattice_isomorphism(s)
            src_rank = _kernel_data(G, s.source).lattice.rank
            if not s.reverse:
                # Psi: I0+L -> I_cur + R ; step: I_cur -> I_next + S
                k = src_rank
                tail = Psi.shape[0] - k
                top = intmat.imatmul(step_iso, Psi[:k, :])
                Psi = np.vstack([top, Psi[k:, :]]) if tail else top
                # order: I_next, S, R  (S inserted before R)
                right = list(s.split_off) + right
            else:
                # step: I_next -> I_cur + A ; need I_cur + A -> I_next
                inv = intmat.to_array(intmat.inverse_unimodular(intmat.as_rows(step_iso)))
                a_rank = sum(index(G, H) for H in s.split_off)
                k = src_rank
                rows_total = Psi.shape[0]
                cols_total = Psi.shape[1]
                # extend Psi by identity on the new left summand A
                ext = np.zeros((rows_total + a_rank, cols_total + a_rank), dtype=Psi.dtype if Psi.dtype == object else np.int64)
                ext[:rows_total, :cols_total] = Psi
                ext[rows_total:, cols_total:] = np.eye(a_rank, dtype=np.int64)
                # reorder rows: I_cur, A, R
                order = list(range(k)) + list(range(rows_total, rows_total + a_rank)) + list(range(k, rows_total))
                ext = ext[order, :]
                ka = k + a_rank
                top = intmat.imatmul(inv, ext[:ka, :])
                Psi = np.vstack([top, ext[ka:, :]]) if ext.shape[0] > ka else top
                left = left + list(s.split_off)
        src_lat = direct_sum(_kernel_data(G, self.start).lattice, *[permutation_lattice(G, H) for H in left]) if left else _kernel_data(G, self.start).lattice
        end_I = _kernel_data(G, self.end).lattice
        dst_lat = direct_sum(end_I, *[permutation_lattice(G, H) for H in right]) if right else end_I
        if not _equivariant(Psi, src_lat, dst_lat) or not _is_unimodular(Psi):
            raise VerificationError("composed trace is not an isomorphism")
        return ChainCertificate(G, self.start, self.end, tuple(left), tuple(right), Psi)

    def to_json(self, with_matrices: bool = True) -> dict:
        return {
            "start": self.start.to_json(self.group),
            "end": self.end.to_json(self.end_group),
            "steps": [s.to_json(with_matrices) for s in self.steps],
        }


@dataclass
class ChainCertificate:
    """Explicit ``I_start + sum Z[G/H_left] = I_end + sum Z[G/H_right]``."""

    group: FiniteGroup
    start: MultinormData
    end: MultinormData
    left: tuple[Subgroup, ...]
    right: tuple[Subgroup, ...]
    matrix: np.ndarray

    def dual_matrix(self) -> np.ndarray:
        """The corresponding isomorphism on the J side (inverse transpose)."""
        inv = intmat.inverse_unimodular(intmat.as_rows(self.matrix))
        return intmat.to_array(intmat.transpose(inv, len(inv)))

    def verify_dual(self) -> None:
        G = self.group
        J0 = build_J(G, self.start)
        J1 = build_J(G, self.end)
        src = direct_sum(J0, *[permutation_lattice(G, H) for H in self.left]) if self.left else J0
        dst = direct_sum(J1, *[permutation_lattice(G, H) for H in self.right]) if self.right else J1
        M = self.dual_matrix()
        # permutation lattices are self-dual in the coset basis, I-side normalisation is harmless
        if not _equivariant(M, src, dst):
            raise VerificationError("dual chain map is not equivariant")


def _trace(G, data) -> ReductionTrace:
    return ReductionTrace(G, data)


# ---------------------------------------------------------------------------
# public reduction operations


def reduce_rded(G: FiniteGroup, HH, phi, target) -> tuple[MultinormData, ReductionTrace]:
    """Apply one RDED split; ``target = (H0, i0, H0', i0')`` with 0-based indices."""
    data = _coerce(HH, phi)
    H0, i0, H0p, i0p = target
    step = rded_step(G, data, H0, i0, H0p, i0p)
    tr = _trace(G, data)
    tr.append(step)
    return step.target, tr


def reduce_rdtr(G: FiniteGroup, HH, phi, target) -> tuple[MultinormData, ReductionTrace]:
    """Apply one RDTR split; ``target = (H0, i0, H0')``."""
    data = _coerce(HH, phi)
    if not data.normalized() == data:
        raise PreconditionFailed("weight function must be normalized")
    H0, i0, H0p = target
    step = rdtr_step(G, data, H0, i0, H0p)
    tr = _trace(G, data)
    tr.append(step)
    return step.target, tr


def reduce_multiplicities(G: FiniteGroup, HH, phi=None) -> tuple[MultinormData, ReductionTrace]:
    """Collapse every multiplicity to one, with weight the gcd of the tuple."""
    data = _coerce(HH, phi)
    if data.content() != 1:
        raise PreconditionFailed("weight function must be normalized")
    tr = _trace(G, data)
    cur = data
    for H, w in data.entries:
        if len(w) > 1:
            step = collapse_step(G, cur, H)
            tr.append(step)
            cur = step.target
    return cur, tr


def reduce_to_reduced(G: FiniteGroup, HH, phi=None) -> tuple[MultinormData, ReductionTrace]:
    """Unit weights: collapse multiplicities and drop non-maximal members."""
    data = _coerce(HH, phi)
    if not data.is_unit:
        raise PreconditionFailed("reduction to the maximal members needs unit weights")
    cur, tr = reduce_multiplicities(G, data)
    while True:
        S = cur.set
        victim = None
        for H in S:
            for K in S:
                if H != K and H.issubset(K):
                    victim = (H, K)
                    break
            if victim:
                break
        if victim is None:
            break
        step = rded_step(G, cur, victim[0], 0, victim[1], 0, rule="RDRD")
        tr.append(step)
        cur = step.target
    return cur, tr


def conj_replace(G: FiniteGroup, HH, H0: Subgroup, g: int, phi=None) -> tuple[MultinormData, ReductionTrace]:
    data = _coerce(HH, phi)
    if not data.is_unit:
        raise PreconditionFailed("conjugation replacement is stated for unit weights")
    if H0 not in data.set:
        raise PreconditionFailed(f"{H0} is not a member")
    step = conj_step(G, data, H0, g)
    tr = _trace(G, data)
    tr.append(step)
    return step.target, tr


def strongly_reduce(G: FiniteGroup, HH, phi=None) -> tuple[MultinormData, ReductionTrace]:
    """Certified passage to the deterministic strongly reduced subset."""
    data = _coerce(HH, phi)
    if not data.is_unit:
        raise PreconditionFailed("strong reduction is stated for unit weights")
    chosen = srd_choice(G, data.set)
    tr = _trace(G, data)
    cur = data
    for H in data.set:
        if H in chosen:
            continue
        for K in chosen:
            g = _subconjugate(G, H, K)
            if g is not None:
                break
        else:  # pragma: no cover - srd_choice guarantees a target
            raise VerificationError("strongly reduced choice does not dominate every member")
        m = len(cur.weight(H))
        for _ in range(m):
            Hc = conjugate(G, H, g)
            if Hc != H:
                step = conj_step(G, cur, H, g, rule="RDSR")
                tr.append(step)
                cur = step.target
            j = len(cur.weight(K)) - 1 if Hc == K else 0
            step = rded_step(G, cur, Hc, 0 if Hc != K else j, K, 0, rule="RDSR")
            tr.append(step)
            cur = step.target
    # remaining multiplicities on chosen members
    for K in chosen:
        while len(cur.weight(K)) > 1:
            step = rded_step(G, cur, K, 1, K, 0, rule="RDSR")
            tr.append(step)
            cur = step.target
    return cur, tr


def _reverse(steps: Sequence[TraceStep]) -> list[TraceStep]:
    out = []
    for s in reversed(steps):
        out.append(
            TraceStep(
                s.rule, s.primitive, s.group, s.target, s.source, s.split_off, s.certificate,
                reverse=not s.reverse, conjugator=s.conjugator, notes=dict(s.notes),
            )
        )
    return out


def absorb_unit_weights(G: FiniteGroup, HH, phi=None) -> tuple[MultinormData, ReductionTrace]:
    """Certified ``[J^(phi)] = [J_{H_phi[1]}]`` following the unit-weight absorption scheme."""
    data = _coerce(HH, phi)
    if data.content() != 1:
        raise PreconditionFailed("weight function must be normalized")
    cur, tr = reduce_multiplicities(G, data)
    for s in tr.steps:
        s.rule = "RDMN"
    unit = [H for H, w in cur.entries if w[0] == 1]
    if not unit:
        raise PreconditionFailed("no member has weight 1")
    others = [(H, w[0]) for H, w in cur.entries if w[0] != 1]
    partners = {}
    for H, d in others:
        for K in unit:
            if d % (H.order // intersection(H, K).order) == 0:
                partners[H] = K
                break
        else:
            raise PreconditionFailed(f"no weight-1 member absorbs {H} (weight {d})")
    if not others:
        return cur, tr
    # enlarge by the intersections with weight 1 (reverse RDED steps)
    daggers = []
    for H, _ in others:
        D = intersection(H, partners[H])
        if D not in daggers and D not in unit:
            daggers.append(D)
    big = cur
    forward: list[TraceStep] = []
    for D in daggers:
        nxt = big.plus(D, (1,))
        # in nxt the new weight-1 entry of D sits inside its partner with weight 1
        K = next(partners[H] for H, _ in others if intersection(H, partners[H]) == D)
        i_new = nxt.weight(D).index(1)
        forward.append(rded_step(G, nxt, D, i_new, K, 0, rule="RDMN"))
        big = nxt
    # each forward step goes (bigger -> smaller); record them reversed so the trace grows
    for step in forward:
        rev = TraceStep(step.rule, step.primitive, G, step.target, step.source, step.split_off,
                        step.certificate, reverse=True, notes=dict(step.notes))
        tr.append(rev)
        cur = rev.target
    # collapse multiplicities created where D was already a member
    for H, w in list(cur.entries):
        if len(w) > 1:
            step = collapse_step(G, cur, H, rule="RDMN")
            tr.append(step)
            cur = step.target
    # transfer the non-unit members into their intersections
    for H, _ in others:
        if len(cur.weight(H)) == 0 or cur.weight(H)[0] == 1:
            continue
        D = intersection(H, partners[H])
        step = rdtr_step(G, cur, H, 0, D, rule="RDMN")
        tr.append(step)
        cur = step.target
    # absorb the auxiliary intersections into their unit partners
    for D in daggers:
        if D in unit or not cur.weight(D):
            continue
        K = next(partners[H] for H, _ in others if intersection(H, partners[H]) == D)
        step = rded_step(G, cur, D, 0, K, 0, rule="RDMN")
        tr.append(step)
        cur = step.target
    # any former non-unit member that became weight 1 sits inside its partner
    for H, _ in others:
        if cur.weight(H) and H not in unit:
            K = partners[H]
            if H.issubset(K):
                step = rded_step(G, cur, H, 0, K, 0, rule="RDMN")
                tr.append(step)
                cur = step.target
    expected = MultinormData(tuple((H, (1,)) for H in unit))
    if cur != expected:
        raise VerificationError("absorption did not reach the unit-weight members")
    return cur, tr


# ---------------------------------------------------------------------------
# change of group


def _sorted_assignment(items):
    """items: list of (target_subgroup, weight, source_block). Returns (data, assignment)."""
    by_target: dict[Subgroup, list] = {}
    for tgt, w, src in items:
        by_target.setdefault(tgt, []).append((w, src))
    entries = []
    assignment = {}
    for tgt, lst in by_target.items():
        lst.sort(key=lambda e: (e[0], e[1]))
        entries.append((tgt, tuple(w for w, _ in lst)))
        for j, (_, src) in enumerate(lst):
            assignment[(tgt, j)] = src
    return MultinormData(tuple(entries)), assignment


def quotient_descend(G: FiniteGroup, HH, phi, N: Subgroup):
    """Descend to G/N: returns ``(G/N, data over G/N, trace)``."""
    data = _coerce(HH, phi)
    if data.content() != 1:
        raise PreconditionFailed("weight function must be normalized")
    if not is_normal(G, N):
        raise NotNormal(f"{N} is not normal")
    q = quotient(G, N)
    Q = q.target
    items = []
    for b, (H, i, w) in enumerate(data.blocks()):
        HN = join(G, H, N)
        items.append((q.image(H), (HN.order // H.order) * w, b))
    raw, assignment = _sorted_assignment(items)
    content = raw.content()
    bar = raw.normalized()
    A = Ambient(G, data)
    Qamb = Ambient(Q, raw)
    inj = np.zeros((A.rank, Qamb.rank), dtype=np.int64)
    for qb, (Hbar, j, _) in enumerate(Qamb.blocks):
        sb = assignment[(Hbar, j)]
        H = A.blocks[sb][0]
        src_cd = coset_data(G, H)
        dst_cd = coset_data(Q, Hbar)
        cols = Qamb.block_slice(qb)
        rows = A.block_slice(sb)
        for c_idx, rep in enumerate(src_cd.reps):
            k = dst_cd.coset_of[q.projection[rep]]
            inj[rows.start + c_idx, cols.start + k] = 1
    step = TraceStep(
        "QUOT", "QUOT", G, data, bar, (), inj, target_group=Q, normal_subgroup=N,
        notes={"content": content},
    )
    step.quotient_map = q  # type: ignore[attr-defined]
    tr = _trace(G, data)
    tr.append(step)
    return Q, bar, tr


def _verify_quotient_step(step: TraceStep) -> None:
    G = step.group
    N = step.normal_subgroup
    q = quotient(G, N)
    Q = q.target
    data, bar = step.source, step.target
    content = step.notes.get("content", 1)
    A = Ambient(G, data)
    raw = MultinormData(tuple((H, tuple(content * x for x in w)) for H, w in bar.entries))
    Qamb = Ambient(Q, raw)
    inj = np.asarray(step.certificate)
    from .lattice import inflate

    if not _equivariant(inj, inflate(Qamb.lattice, q), A.lattice):
        raise VerificationError("descent map is not equivariant")
    if not np.array_equal(intmat.imatmul(A.augmentation, inj), Qamb.augmentation):
        raise VerificationError("descent map does not intertwine the augmentations")
    # image must be the N-fixed part of the ambient lattice
    Afix, _, _ = fixed_part(A.lattice, N)
    img = intmat.hnf_basis(intmat.as_rows(inj.T), A.rank)
    from .lattice import invariants

    fixed = intmat.hnf_basis(invariants(A.lattice, N), A.rank)
    if img != fixed:
        raise VerificationError("descent map image differs from the fixed part")
    # lattice level: I^N = inj(I_bar)
    kd = _kernel_data(G, data)
    kq = _kernel_data(Q, bar)
    F, emb, _ = fixed_part(kd.lattice, N)
    lhs = intmat.hnf_basis(intmat.as_rows(intmat.imatmul(kd.basis, emb.matrix).T), A.rank)
    rhs = intmat.hnf_basis(intmat.as_rows(intmat.imatmul(inj, kq.basis).T), A.rank)
    if lhs != rhs:
        raise VerificationError("fixed part of I differs from the descended lattice")
    X = intmat.imatmul(kd.left_inverse, intmat.imatmul(inj, kq.basis))
    # X: coordinates of I_bar basis in I; express inside F via its embedding
    Fcols = intmat.imatmul(kd.left_inverse, intmat.imatmul(kd.basis, emb.matrix))
    L = intmat.to_array(intmat.left_inverse(intmat.as_rows(Fcols.T)), (Fcols.shape[1], Fcols.shape[0])) if Fcols.size else np.zeros((0, 0), dtype=np.int64)
    Y = intmat.imatmul(L, X) if X.size else np.zeros((0, 0), dtype=np.int64)
    if not _is_unimodular(Y) or not _equivariant(Y, kq.lattice, F):
        raise VerificationError("descended lattice is not isomorphic to the fixed part")


def restrict_multinorm(G: FiniteGroup, HH, phi, P: Subgroup):
    """Mackey restriction to P: returns ``(P as a group, data over P, trace)``."""
    data = _coerce(HH, phi)
    if data.content() != 1:
        raise PreconditionFailed("weight function must be normalized")
    emb = subgroup_as_group(G, P)
    PG = emb.group
    items = []
    pieces = []  # (source block, rep g, target subgroup in P numbering)
    for b, (H, i, w) in enumerate(data.blocks()):
        for g in double_coset_reps(G, P, H):
            K = intersection(P, conjugate(G, H, g))
            Kp = emb.pull(K)
            items.append((Kp, w, (b, g)))
    dst, assignment = _sorted_assignment(items)
    A = Ambient(G, data)
    B = Ambient(PG, dst)
    T = np.zeros((B.rank, A.rank), dtype=np.int64)
    for pb, (Kp, j, _) in enumerate(B.blocks):
        sb, g = assignment[(Kp, j)]
        H = A.blocks[sb][0]
        src_cd = coset_data(G, H)
        dst_cd = coset_data(PG, Kp)
        rows = B.block_slice(pb)
        cols = A.block_slice(sb)
        for p_local in range(PG.order):
            p = emb.to_parent[p_local]
            x = G.mul(p, g)
            T[rows.start + dst_cd.coset_of[p_local], cols.start + src_cd.coset_of[x]] = 1
    step = TraceStep("RESTRICT", "RESTRICT", G, data, dst, (), T, target_group=PG, subgroup=P)
    tr = _trace(G, data)
    tr.append(step)
    return PG, dst, tr


def _verify_restrict_step(step: TraceStep) -> None:
    G = step.group
    P = step.subgroup
    PG = step.codomain_group
    data, dst = step.source, step.target
    A = Ambient(G, data)
    B = Ambient(PG, dst)
    T = np.asarray(step.certificate)
    if T.shape != (B.rank, A.rank):
        raise VerificationError("restriction certificate has the wrong shape")
    # permutation matrix
    if not (np.all((T == 0) | (T == 1)) and np.all(T.sum(axis=0) == 1) and np.all(T.sum(axis=1) == 1)):
        raise VerificationError("restriction certificate is not a basis bijection")
    if not _equivariant(T, restrict(A.lattice, P), B.lattice):
        raise VerificationError("restriction certificate is not P-equivariant")
    if not np.array_equal(intmat.imatmul(B.augmentation, T), A.augmentation):
        raise VerificationError("restriction certificate does not intertwine the augmentations")
    kd = _kernel_data(G, data)
    kp = _kernel_data(PG, dst)
    X = intmat.imatmul(kp.left_inverse, intmat.imatmul(T, kd.basis))
    if not np.array_equal(intmat.imatmul(kp.basis, X), intmat.imatmul(T, kd.basis)):
        raise VerificationError("restriction does not carry I onto I_P")
    if not _is_unimodular(X) or not _equivariant(X, restrict(kd.lattice, P), kp.lattice):
        raise VerificationError("restricted lattices are not isomorphic")


# ---------------------------------------------------------------------------
# the relation H' < H


def xi_injection(HHp: Sequence[Subgroup], HH: Sequence[Subgroup]) -> dict[Subgroup, Subgroup] | None:
    """An injection Xi: HH' -> set(HH) with Xi(H') inside H', via bipartite matching."""
    targets = sorted(set(HH), key=lambda H: H.key())
    match_of_target: dict[Subgroup, Subgroup] = {}

    def try_assign(Hp, seen):
        for T in targets:
            if T.issubset(Hp) and T not in seen:
                seen.add(T)
                if T not in match_of_target or try_assign(match_of_target[T], seen):
                    match_of_target[T] = Hp
                    return True
        return False

    for Hp in HHp:
        if not try_assign(Hp, set()):
            return None
    return {Hp: T for T, Hp in match_of_target.items()}


def precedes(HHp: Sequence[Subgroup], HH: Sequence[Subgroup]) -> bool:
    S = list(HHp)
    reduced = len(set(S)) == len(S) and not any(a != b and a.issubset(b) for a in S for b in S)
    return reduced and xi_injection(S, HH) is not None
