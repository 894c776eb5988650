"""Finite groups as Cayley tables, subgroups, quotients and recognizers.

Elements are integers ``0..n-1`` with ``0`` the identity.  A group may carry
named generators (``s``, ``t``, ``r``, ``i``, ``j`` ...) which the CLI
mini-language and the explicit resolutions use to spell elements.

>>> G = catalog_group("D4")
>>> G.order, len(all_subgroups(G))
(8, 10)
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, reduce
from math import gcd
from typing import Callable, Hashable, Iterable, Sequence

import numpy as np

from .config import cap
from .errors import ClosureTooLarge, NotNormal, ParseError


@dataclass(frozen=True, order=False)
class Subgroup:
    """A subgroup in canonical form: the sorted tuple of its element indices."""

    elements: tuple[int, ...]

    def __post_init__(self):
        els = tuple(sorted(set(int(x) for x in self.elements)))
        object.__setattr__(self, "elements", els)

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def _set(self) -> frozenset:
        return frozenset(self.elements)

    def __contains__(self, g) -> bool:
        return g in self._set

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def issubset(self, other: "Subgroup") -> bool:
        return self._set <= other._set

    def key(self):
        return (len(self.elements), self.elements)

    def __lt__(self, other: "Subgroup") -> bool:
        return self.key() < other.key()

    def __repr__(self) -> str:
        return f"Subgroup{list(self.elements)}"


class FiniteGroup:
    """Cayley-table group.  ``table[g][h]`` is the index of ``g*h``."""

    def __init__(
        self,
        table,
        label: str | None = None,
        generators: Sequence[int] | None = None,
        names: dict[str, int] | None = None,
        check: bool = True,
    ):
        tab = np.asarray(table, dtype=np.int64)
        n = tab.shape[0]
        if tab.shape != (n, n):
            raise ValueError("Cayley table must be square")
        self.table = tab
        self._rows = tab.tolist()
        self.order = n
        self.label = label
        inv = [0] * n
        for g in range(n):
            row = self._rows[g]
            for h in range(n):
                if row[h] == 0:
                    inv[g] = h
                    break
        self.inverse = inv
        if check:
            self.validate()
        if generators is None:
            generators = _greedy_generators(self)
        self.generators = tuple(g for g in generators if g != 0) if n > 1 else ()
        self.names = dict(names or {})

    def validate(self) -> None:
        n, t = self.order, self.table
        ar = np.arange(n)
        if not (np.array_equal(t[0], ar) and np.array_equal(t[:, 0], ar)):
            raise ValueError("element 0 is not the identity")
        for row in self._rows:
            if sorted(row) != list(range(n)):
                raise ValueError("table rows must be permutations")
        # associativity: (g h) k == g (h k) for all triples, vectorised per g
        for g in range(n):
            lhs = t[t[g]]  # lhs[h][k] = (g h) k
            rhs = t[g][t]  # rhs[h][k] = g (h k)
            if not np.array_equal(lhs, rhs):
                raise ValueError("table is not associative")

    # -- basic arithmetic -------------------------------------------------
    def mul(self, g: int, h: int) -> int:
        return self._rows[g][h]

    def inv(self, g: int) -> int:
        return self.inverse[g]

    def prod(self, elements: Iterable[int]) -> int:
        out = 0
        for x in elements:
            out = self._rows[out][x]
        return out

    def power(self, g: int, k: int) -> int:
        if k < 0:
            g, k = self.inverse[g], -k
        out = 0
        for _ in range(k % self.element_order(g)):
            out = self._rows[out][g]
        return out

    def conj(self, g: int, x: int) -> int:
        """g x g^{-1}"""
        return self._rows[self._rows[g][x]][self.inverse[g]]

    def commutator(self, g: int, h: int) -> int:
        return self.prod([g, h, self.inverse[g], self.inverse[h]])

    def element_order(self, g: int) -> int:
        return self._orders[g]

    @cached_property
    def _orders(self) -> list[int]:
        out = []
        for g in range(self.order):
            k, x = 1, g
            while x != 0:
                x = self._rows[x][g]
                k += 1
            out.append(k)
        return out

    @property
    def rows(self) -> list[list[int]]:
        return self._rows

    # -- word tree used to build matrices on all elements ---------------
    @cached_property
    def word_tree(self) -> list[tuple[int, int]]:
        """For each g != 1 a pair (generator position j, parent p) with g = s_j * p.

        Entry 0 is (-1, -1).  Elements are reached in BFS order.
        """
        tree: list[tuple[int, int] | None] = [None] * self.order
        tree[0] = (-1, -1)
        order = [0]
        for x in order:
            for j, s in enumerate(self.generators):
                y = self._rows[s][x]
                if tree[y] is None:
                    tree[y] = (j, x)
                    order.append(y)
        if len(order) != self.order:
            raise ValueError("generators do not generate the group")
        self._bfs_order = order
        return tree  # type: ignore[return-value]

    @property
    def bfs_order(self) -> list[int]:
        self.word_tree
        return self._bfs_order

    # -- naming ---------------------------------------------------------
    @cached_property
    def element_names(self) -> list[str]:
        """Shortest words in the named generators (index fallback ``#k``)."""
        names = ["1"] + [None] * (self.order - 1)  # type: ignore[list-item]
        if not self.names:
            return ["1"] + [f"#{g}" for g in range(1, self.order)]
        gens = sorted(self.names.items())
        # BFS on right multiplication so that words read left to right
        frontier = [0]
        words = {0: []}
        while frontier:
            nxt = []
            for x in frontier:
                for nm, s in gens:
                    y = self._rows[x][s]
                    if y not in words:
                        words[y] = words[x] + [nm]
                        nxt.append(y)
            frontier = nxt
        for g in range(1, self.order):
            if g in words:
                names[g] = _compress_word(words[g])
            else:
                names[g] = f"#{g}"
        return names  # type: ignore[return-value]

    def name(self, g: int) -> str:
        return self.element_names[g]

    def word(self, text: str) -> int:
        """Evaluate a word such as ``s^2t`` or ``st^-1`` (or ``#5`` / ``1``)."""
        return parse_word(self, text)

    # -- equality -------------------------------------------------------
    def __eq__(self, other) -> bool:
        if self is other:
            return True
        return isinstance(other, FiniteGroup) and np.array_equal(self.table, other.table)

    def __hash__(self) -> int:
        return hash((self.order, self.table.tobytes()))

    def __repr__(self) -> str:
        return f"FiniteGroup({self.label or '?'}, order={self.order})"

    # -- convenience ----------------------------------------------------
    def subgroup(self, gens: Iterable[int]) -> Subgroup:
        return closure(self, gens)

    @property
    def whole(self) -> Subgroup:
        return Subgroup(tuple(range(self.order)))

    @property
    def trivial(self) -> Subgroup:
        return Subgroup((0,))


def _compress_word(letters: list[str]) -> str:
    out = []
    i = 0
    while i < len(letters):
        j = i
        while j < len(letters) and letters[j] == letters[i]:
            j += 1
        k = j - i
        out.append(letters[i] if k == 1 else f"{letters[i]}^{k}")
        i = j
    return "".join(out)


def _greedy_generators(G: FiniteGroup) -> tuple[int, ...]:
    gens: list[int] = []
    current = {0}
    for g in range(1, G.order):
        if g not in current:
            gens.append(g)
            current = set(closure(G, gens).elements)
            if len(current) == G.order:
                break
    return tuple(gens)


def closure(G: FiniteGroup, gens: Iterable[int]) -> Subgroup:
    """Subgroup generated by ``gens``."""
    rows = G.rows
    gens = [g for g in set(gens) if g != 0]
    seen = {0}
    queue = [0]
    for x in queue:
        for s in gens:
            y = rows[x][s]
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return Subgroup(tuple(seen))


def group_from_rule(
    identity: Hashable,
    gens: Sequence[Hashable],
    mul: Callable[[Hashable, Hashable], Hashable],
    label: str | None = None,
    gen_names: Sequence[str] | None = None,
    limit: int | None = None,
) -> FiniteGroup:
    """Close ``gens`` under ``mul`` and return the Cayley table.

    Numbering is BFS over generator words: elements are discovered by left
    multiplication with the generators in the given order.
    """
    limit = cap("closure") if limit is None else limit
    elements = [identity]
    index = {identity: 0}
    for x in elements:
        for s in gens:
            y = mul(s, x)
            if y not in index:
                index[y] = len(elements)
                elements.append(y)
                if len(elements) > limit:
                    raise ClosureTooLarge(f"closure exceeds {limit} elements")
    n = len(elements)
    table = [[index[mul(a, b)] for b in elements] for a in elements]
    gen_idx = [index[s] for s in gens]
    names = {}
    if gen_names:
        for nm, gi in zip(gen_names, gen_idx):
            names[nm] = gi
    uniq = []
    for g in gen_idx:
        if g != 0 and g not in uniq:
            uniq.append(g)
    return FiniteGroup(table, label=label, generators=uniq, names=names, check=False)


def group_from_permutations(
    degree: int, generators: Sequence[Sequence[int]], label: str | None = None, gen_names: Sequence[str] | None = None
) -> FiniteGroup:
    """Permutation group generated by the given images lists.

    Composition is ``(p*q)(x) = p(q(x))``.
    """
    gens = []
    for p in generators:
        p = tuple(int(x) for x in p)
        if sorted(p) != list(range(degree)):
            raise ParseError(f"not a permutation of 0..{degree - 1}: {list(p)}")
        gens.append(p)
    ident = tuple(range(degree))

    def mul(p, q):
        return tuple(p[q[x]] for x in range(degree))

    return group_from_rule(ident, gens, mul, label=label, gen_names=gen_names)


# ---------------------------------------------------------------------------
# subgroup enumeration and basic subgroup operations


def all_subgroups(G: FiniteGroup) -> list[Subgroup]:
    """Every subgroup once, sorted by (order, elements)."""
    return list(_all_subgroups_cached(G))


_SUBGROUP_CACHE: dict = {}


def _all_subgroups_cached(G: FiniteGroup) -> tuple[Subgroup, ...]:
    key = (G.order, G.table.tobytes())
    hit = _SUBGROUP_CACHE.get(key)
    if hit is not None:
        return hit
    limit = cap("subgroups")
    if G.order > limit:
        raise ClosureTooLarge(f"subgroup enumeration capped at order {limit}")
    cyclics = {}
    for g in range(G.order):
        H = closure(G, [g])
        cyclics.setdefault(H.elements, H)
    found = dict(cyclics)
    frontier = list(cyclics.values())
    cyc_list = list(cyclics.values())
    while frontier:
        new = []
        for A in frontier:
            for C in cyc_list:
                if C.issubset(A):
                    continue
                J = closure(G, A.elements + C.elements)
                if J.elements not in found:
                    found[J.elements] = J
                    new.append(J)
        frontier = new
    out = tuple(sorted(found.values(), key=Subgroup.key))
    if len(_SUBGROUP_CACHE) > 256:
        _SUBGROUP_CACHE.clear()
    _SUBGROUP_CACHE[key] = out
    return out


def conjugate(G: FiniteGroup, H: Subgroup, g: int) -> Subgroup:
    """g H g^{-1}"""
    return Subgroup(tuple(G.conj(g, h) for h in H.elements))


def is_normal(G: FiniteGroup, H: Subgroup) -> bool:
    for g in G.generators:
        for h in H.elements:
            if G.conj(g, h) not in H:
                return False
    return True


def normal_core(G: FiniteGroup, HH: Iterable[Subgroup]) -> Subgroup:
    """Largest normal subgroup contained in every member."""
    common = set(range(G.order))
    for H in HH:
        for g in range(G.order):
            common &= {G.conj(g, h) for h in H.elements}
    return Subgroup(tuple(common))


def normalizer(G: FiniteGroup, H: Subgroup) -> Subgroup:
    return Subgroup(tuple(g for g in range(G.order) if conjugate(G, H, g) == H))


def centralizer(G: FiniteGroup, S: Iterable[int]) -> Subgroup:
    S = list(S)
    return Subgroup(tuple(g for g in range(G.order) if all(G.mul(g, x) == G.mul(x, g) for x in S)))


def center(G: FiniteGroup) -> Subgroup:
    return centralizer(G, G.generators or [0])


def are_conjugate(G: FiniteGroup, H1: Subgroup, H2: Subgroup) -> int | None:
    """Some g with g H1 g^{-1} = H2, or None."""
    if H1.order != H2.order:
        return None
    for g in range(G.order):
        if conjugate(G, H1, g) == H2:
            return g
    return None


def intersection(*subgroups: Subgroup) -> Subgroup:
    common = set(subgroups[0].elements)
    for H in subgroups[1:]:
        common &= set(H.elements)
    return Subgroup(tuple(common))


def join(G: FiniteGroup, *subgroups: Subgroup) -> Subgroup:
    return closure(G, [x for H in subgroups for x in H.elements])


def product_set(G: FiniteGroup, A: Subgroup, B: Subgroup) -> set[int]:
    return {G.mul(a, b) for a in A.elements for b in B.elements}


def left_cosets(G: FiniteGroup, H: Subgroup) -> list[tuple[int, ...]]:
    """Left cosets gH sorted by their minimal element (each sorted)."""
    seen = [False] * G.order
    out = []
    for g in range(G.order):
        if not seen[g]:
            c = tuple(sorted(G.mul(g, h) for h in H.elements))
            for x in c:
                seen[x] = True
            out.append(c)
    return out


def double_coset_reps(G: FiniteGroup, P: Subgroup, H: Subgroup) -> list[int]:
    """Minimal-index representatives of the double cosets P g H, in order."""
    seen = [False] * G.order
    reps = []
    for g in range(G.order):
        if seen[g]:
            continue
        reps.append(g)
        for p in P.elements:
            pg = G.mul(p, g)
            for h in H.elements:
                seen[G.mul(pg, h)] = True
    return reps


def index(G: FiniteGroup, H: Subgroup) -> int:
    return G.order // H.order


# ---------------------------------------------------------------------------
# quotients and subgroups as standalone groups


@dataclass(frozen=True)
class QuotientMap:
    source: FiniteGroup
    target: FiniteGroup
    projection: tuple[int, ...]
    kernel: Subgroup
    representatives: tuple[int, ...]  # minimal element of each coset

    def image(self, H: Subgroup) -> Subgroup:
        return Subgroup(tuple({self.projection[h] for h in H.elements}))

    def preimage(self, Hbar: Subgroup) -> Subgroup:
        return Subgroup(tuple(g for g in range(self.source.order) if self.projection[g] in Hbar))


def quotient(G: FiniteGroup, N: Subgroup) -> QuotientMap:
    if not is_normal(G, N):
        raise NotNormal(f"{N} is not normal in {G}")
    cosets = left_cosets(G, N)
    proj = [0] * G.order
    for ci, c in enumerate(cosets):
        for x in c:
            proj[x] = ci
    reps = [c[0] for c in cosets]
    table = [[proj[G.mul(a, b)] for b in reps] for a in reps]
    gens = []
    for g in G.generators:
        q = proj[g]
        if q != 0 and q not in gens:
            gens.append(q)
    names = {nm: proj[g] for nm, g in G.names.items()}
    label = f"{G.label}/N" if G.label else None
    Q = FiniteGroup(table, label=label, generators=gens, names=names, check=False)
    return QuotientMap(G, Q, tuple(proj), N, tuple(reps))


@dataclass(frozen=True)
class SubgroupEmbedding:
    """A subgroup P of G viewed as a standalone group.

    ``to_parent[i]`` is the parent index of element ``i`` of ``group``.
    """

    parent: FiniteGroup
    subgroup: Subgroup
    group: FiniteGroup
    to_parent: tuple[int, ...]

    @cached_property
    def from_parent(self) -> dict[int, int]:
        return {g: i for i, g in enumerate(self.to_parent)}

    def lift(self, H: Subgroup) -> Subgroup:
        return Subgroup(tuple(self.to_parent[h] for h in H.elements))

    def pull(self, H: Subgroup) -> Subgroup:
        """Parent subgroup contained in P -> subgroup of the standalone group."""
        fp = self.from_parent
        return Subgroup(tuple(fp[h] for h in H.elements))


_EMBED_CACHE: dict = {}


def subgroup_as_group(G: FiniteGroup, P: Subgroup) -> SubgroupEmbedding:
    key = (G.order, G.table.tobytes(), P.elements)
    hit = _EMBED_CACHE.get(key)
    if hit is not None:
        return hit
    els = list(P.elements)
    pos = {g: i for i, g in enumerate(els)}
    table = [[pos[G.mul(a, b)] for b in els] for a in els]
    label = f"{G.label}|{P.order}" if G.label else None
    H = FiniteGroup(table, label=label, check=False)
    # carry over names of parent generators that lie in P
    H.names = {nm: pos[g] for nm, g in G.names.items() if g in pos}
    emb = SubgroupEmbedding(G, P, H, tuple(els))
    if len(_EMBED_CACHE) > 512:
        _EMBED_CACHE.clear()
    _EMBED_CACHE[key] = emb
    return emb


# ---------------------------------------------------------------------------
# structure recognition


def prime_factors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        while n % p == 0:
            if p not in out:
                out.append(p)
            n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


def p_part(n: int, p: int) -> int:
    out = 1
    while n % p == 0:
        n //= p
        out *= p
    return out


def is_abelian(G: FiniteGroup) -> bool:
    return all(G.mul(a, b) == G.mul(b, a) for a in G.generators for b in G.generators)


def cyclic_generator(G: FiniteGroup) -> int | None:
    for g in range(G.order):
        if G.element_order(g) == G.order:
            return g
    return None


def is_cyclic_quotient(G: FiniteGroup, N: Subgroup) -> bool:
    """Whether G/N is cyclic (N normal)."""
    return cyclic_generator(quotient(G, N).target) is not None


def derived_subgroup(G: FiniteGroup) -> Subgroup:
    comms = {G.commutator(a, b) for a in range(G.order) for b in range(G.order)}
    return closure(G, comms)


def sylow_subgroups_if_nilpotent(G: FiniteGroup) -> dict[int, Subgroup] | None:
    """Sylow subgroups when G is nilpotent (each unique), else None."""
    out = {}
    for p in prime_factors(G.order):
        els = [g for g in range(G.order) if p_part(G.element_order(g), p) == G.element_order(g)]
        if len(els) != p_part(G.order, p):
            return None
        S = Subgroup(tuple(els))
        if closure(G, els) != S:
            return None
        out[p] = S
    return out


def hall_odd_part(G: FiniteGroup) -> Subgroup | None:
    """The set of odd-order elements when it is a subgroup, else None."""
    els = [g for g in range(G.order) if G.element_order(g) % 2 == 1]
    S = Subgroup(tuple(els))
    if closure(G, els) != S:
        return None
    return S


def frattini(G: FiniteGroup) -> Subgroup | None:
    """Frattini subgroup.

    For nilpotent groups this is generated by p-th powers and commutators of
    the Sylow subgroups; otherwise maximal subgroups are intersected (only
    when subgroup enumeration is within the cap).
    """
    syl = sylow_subgroups_if_nilpotent(G)
    if syl is not None:
        gens = set()
        for p, S in syl.items():
            for a in S.elements:
                gens.add(G.power(a, p))
                for b in S.elements:
                    gens.add(G.commutator(a, b))
        return closure(G, gens)
    if G.order > cap("subgroups"):
        return None
    return intersection(G.whole, *maximal_subgroups(G))


def maximal_subgroups(G: FiniteGroup) -> list[Subgroup]:
    subs = [H for H in all_subgroups(G) if H.order < G.order]
    return [H for H in subs if not any(H.order < K.order and H.issubset(K) for K in subs)]


@dataclass(frozen=True)
class MaximalClassTag:
    kind: str  # Dihedral | SemiDihedral | Quaternion | No
    nu: int = 0
    generators: tuple[int, ...] = ()

    def __str__(self) -> str:
        return "No" if self.kind == "No" else f"{self.kind}({self.nu})"


@dataclass(frozen=True)
class OddTimesDihedral:
    m: int
    nu: int
    rho: int
    sigma: int
    tau: int


@dataclass(frozen=True)
class StructureReport:
    order: int
    is_abelian: bool
    is_cyclic: bool
    cyclic_generator: int | None
    elementary_abelian_prime: int | None
    prime: int | None  # p when G is a nontrivial p-group
    is_nilpotent: bool
    sylow: dict = field(default_factory=dict)
    frattini: Subgroup | None = None
    center: Subgroup | None = None
    maximal_class: MaximalClassTag = MaximalClassTag("No")
    odd_times_dihedral: OddTimesDihedral | None = None


def _log2_exact(n: int) -> int | None:
    if n <= 0 or n & (n - 1):
        return None
    return n.bit_length() - 1


def dihedral_generators(G: FiniteGroup) -> tuple[int, int, int] | None:
    """(nu, sigma, tau) when G is dihedral of order 2^(nu+1), nu >= 1.

    For order 4 this recognises the Klein four group (sigma, tau distinct
    involutions).  Searched over element pairs in index order.
    """
    k = _log2_exact(G.order)
    if k is None or k < 2:
        return None
    nu = k - 1
    half = G.order // 2
    for s in range(G.order):
        if G.element_order(s) != half:
            continue
        sub = closure(G, [s])
        s_inv = G.inv(s)
        for t in range(G.order):
            if t in sub or G.element_order(t) != 2:
                continue
            if G.conj(t, s) == s_inv:
                return nu, s, t
        # every element of the right order behaves alike up to automorphism
        return None
    return None


def _recognize_maximal_class(G: FiniteGroup) -> MaximalClassTag:
    k = _log2_exact(G.order)
    if k is None or k < 2:
        return MaximalClassTag("No")
    if k == 2:
        d = dihedral_generators(G)
        return MaximalClassTag("Dihedral", 1, (d[1], d[2])) if d else MaximalClassTag("No")
    half = G.order // 2
    cands = [s for s in range(G.order) if G.element_order(s) == half]
    for s in cands:
        sub = closure(G, [s])
        s_inv = G.inv(s)
        semi = G.power(s, half // 2 - 1)
        zq = G.power(s, half // 2)
        for t in range(G.order):
            if t in sub:
                continue
            ct = G.conj(t, s)
            if G.element_order(t) == 2 and ct == s_inv:
                return MaximalClassTag("Dihedral", k - 1, (s, t))
            if k >= 4 and G.element_order(t) == 2 and ct == semi:
                return MaximalClassTag("SemiDihedral", k - 1, (s, t))
            if G.mul(t, t) == zq and ct == s_inv:
                return MaximalClassTag("Quaternion", k, (s, t))
    return MaximalClassTag("No")


def structure_report(G: FiniteGroup) -> StructureReport:
    n = G.order
    ab = is_abelian(G)
    cg = cyclic_generator(G)
    primes = prime_factors(n)
    prime = primes[0] if len(primes) == 1 else None
    elem = None
    if prime is not None and ab and all(G.element_order(g) in (1, prime) for g in range(n)):
        elem = prime
    syl = sylow_subgroups_if_nilpotent(G)
    nil = syl is not None
    mc = _recognize_maximal_class(G) if prime == 2 else MaximalClassTag("No")
    otd = None
    if nil and n % 4 == 0:
        otd = _odd_times_dihedral(G, syl)
    return StructureReport(
        order=n,
        is_abelian=ab,
        is_cyclic=cg is not None,
        cyclic_generator=cg,
        elementary_abelian_prime=elem,
        prime=prime,
        is_nilpotent=nil,
        sylow=dict(syl or {}),
        frattini=frattini(G),
        center=center(G),
        maximal_class=mc,
        odd_times_dihedral=otd,
    )


def _odd_times_dihedral(G: FiniteGroup, syl: dict[int, Subgroup]) -> OddTimesDihedral | None:
    two = syl.get(2)
    if two is None:
        return None
    odd_els = [g for g in range(G.order) if G.element_order(g) % 2 == 1]
    m = len(odd_els)
    rho = 0
    for g in odd_els:
        if G.element_order(g) == m:
            rho = g
            break
    else:
        if m > 1:
            return None
    emb = subgroup_as_group(G, two)
    d = dihedral_generators(emb.group)
    if d is None:
        return None
    nu, s, t = d
    return OddTimesDihedral(m, nu, rho, emb.to_parent[s], emb.to_parent[t])


def abelian_invariants(A: FiniteGroup) -> list[int]:
    """Invariant factors of a finite abelian group, from element-order counts."""
    invs_by_p: dict[int, list[int]] = {}
    for p in prime_factors(A.order):
        # number of elements with order dividing p^j determines the partition
        exps = []
        j = 1
        counts = [1]
        while True:
            c = sum(1 for g in range(A.order) if p**j % A.element_order(g) == 0)
            counts.append(c)
            if c == p_part(A.order, p):
                break
            j += 1
        # counts[j] = p^{sum_i min(e_i, j)}
        logs = [_logp(c, p) for c in counts]
        # number of cyclic factors with exponent >= j is logs[j] - logs[j-1]
        ge = [logs[j] - logs[j - 1] for j in range(1, len(logs))]
        for j in range(len(ge)):
            nxt = ge[j + 1] if j + 1 < len(ge) else 0
            exps += [j + 1] * (ge[j] - nxt)
        invs_by_p[p] = sorted(p**e for e in exps)
    # combine primary parts into invariant factors
    longest = max((len(v) for v in invs_by_p.values()), default=0)
    out = [1] * longest
    for p, vals in invs_by_p.items():
        vals = [1] * (longest - len(vals)) + vals
        out = [a * b for a, b in zip(out, vals)]
    return [d for d in out if d > 1]


def _logp(c: int, p: int) -> int:
    e = 0
    while c > 1:
        c //= p
        e += 1
    return e


def abelianization_invariants(G: FiniteGroup) -> list[int]:
    return abelian_invariants(quotient(G, derived_subgroup(G)).target)


# ---------------------------------------------------------------------------
# catalog


def _cyclic_rule(n):
    return 0, [1 % n] if n > 1 else [0], (lambda a, b: (a + b) % n)


def cyclic(n: int, name: str = "s") -> FiniteGroup:
    if n == 1:
        return FiniteGroup([[0]], label="C1", generators=(), names={})
    return group_from_rule(0, [1], lambda a, b: (a + b) % n, label=f"C{n}", gen_names=[name])


def semidirect_cyclic(n: int, k: int, u: int, label: str, names=("s", "t")) -> FiniteGroup:
    """C_n x| C_k where the generator t of C_k acts by s -> s^u."""
    if pow(u, k, n) != 1 % n:
        raise ValueError("u must have multiplicative order dividing k")
    pw = [pow(u, b, n) for b in range(k)]

    def mul(x, y):
        return ((x[0] + y[0] * pw[x[1]]) % n, (x[1] + y[1]) % k)

    return group_from_rule((0, 0), [(1 % n, 0), (0, 1 % k)], mul, label=label, gen_names=list(names))


def dihedral(n: int) -> FiniteGroup:
    """Dihedral group of order 2n: <s, t | s^n, t^2, t s t = s^-1>."""
    if n == 1:
        return group_from_rule((0, 0), [(0, 1)], lambda x, y: (0, (x[1] + y[1]) % 2), label="D1", gen_names=["t"])
    return semidirect_cyclic(n, 2, n - 1, label=f"D{n}")


def semidihedral(order: int) -> FiniteGroup:
    half = order // 2
    return semidirect_cyclic(half, 2, half // 2 - 1, label=f"SD{order}")


def quaternion(order: int) -> FiniteGroup:
    """Generalised quaternion group of the given order (a power of 2, >= 8)."""
    half = order // 2
    quarter = half // 2

    def mul(x, y):
        a, b = x
        c, d = y
        sign = -1 if b else 1
        e = (a + sign * c + (quarter if (b and d) else 0)) % half
        return (e, (b + d) % 2)

    return group_from_rule((0, 0), [(1, 0), (0, 1)], mul, label=f"Q{order}", gen_names=["i", "j"])


def heisenberg(p: int) -> FiniteGroup:
    def mul(x, y):
        return ((x[0] + y[0]) % p, (x[1] + y[1]) % p, (x[2] + y[2] + x[0] * y[1]) % p)

    return group_from_rule((0, 0, 0), [(1, 0, 0), (0, 1, 0)], mul, label=f"Heis{p**3}", gen_names=["s", "t"])


def direct_product(factors: Sequence[FiniteGroup], label: str | None = None, names: Sequence[str] | None = None) -> FiniteGroup:
    """Direct product with generators taken factor by factor."""
    k = len(factors)
    ident = (0,) * k
    gens = []
    orig_names = []
    for i, F in enumerate(factors):
        inv_names = {v: nm for nm, v in F.names.items()}
        for g in F.generators:
            e = [0] * k
            e[i] = g
            gens.append(tuple(e))
            orig_names.append((i, inv_names.get(g)))

    rows = [F.rows for F in factors]

    def mul(x, y):
        return tuple(rows[i][x[i]][y[i]] for i in range(k))

    if names is None:
        names = _product_names(factors, orig_names)
    return group_from_rule(ident, gens, mul, label=label, gen_names=list(names))


_POOL = ["r", "u", "v", "w", "x", "y", "z"]


def _product_names(factors, orig_names):
    all_cyclic = all(cyclic_generator(F) is not None for F in factors)
    if all_cyclic:
        k = len(orig_names)
        if k == 1:
            return ["s"]
        if k == 2:
            return ["s", "t"]
        if k == 3:
            return ["r", "s", "t"]
        return [f"g{i + 1}" for i in range(k)]
    used = [nm for (i, nm) in orig_names if nm is not None and cyclic_generator(factors[i]) is None]
    clash = len(used) != len(set(used))
    out = []
    pool = [p for p in _POOL if p not in used]
    for i, nm in orig_names:
        if cyclic_generator(factors[i]) is not None:
            out.append(pool.pop(0))
        elif clash or nm is None:
            out.append(f"{nm or 'g'}{i + 1}")
        else:
            out.append(nm)
    return out


def _elementary(p: int, k: int) -> FiniteGroup:
    G = direct_product([cyclic(p)] * k, label=f"E({p},{k})")
    return G


_SIMPLE_NAMES = {
    "S3": lambda: _relabel(dihedral(3), "S3"),
    "A4": lambda: group_from_permutations(4, [[1, 2, 0, 3], [1, 0, 3, 2]], label="A4", gen_names=["a", "b"]),
    "S4": lambda: group_from_permutations(4, [[1, 2, 3, 0], [1, 0, 2, 3]], label="S4", gen_names=["a", "b"]),
    "Heis27": lambda: heisenberg(3),
    "M16": lambda: semidirect_cyclic(8, 2, 5, label="M16"),
    "Dic3": lambda: semidirect_cyclic(3, 4, 2, label="Dic3"),
}


def _relabel(G: FiniteGroup, label: str) -> FiniteGroup:
    G.label = label
    return G


def _atom(name: str) -> FiniteGroup:
    if name in _SIMPLE_NAMES:
        return _SIMPLE_NAMES[name]()
    m = re.fullmatch(r"C(\d+)", name)
    if m:
        return cyclic(int(m.group(1)))
    m = re.fullmatch(r"SD(\d+)", name)
    if m:
        n = int(m.group(1))
        if _log2_exact(n) is None or n < 16:
            raise ParseError(f"semidihedral order must be a power of 2 >= 16: {name}")
        return semidihedral(n)
    m = re.fullmatch(r"D(\d+)", name)
    if m:
        n = int(m.group(1))
        if n < 1:
            raise ParseError(name)
        return dihedral(n)
    m = re.fullmatch(r"Q(\d+)", name)
    if m:
        n = int(m.group(1))
        if _log2_exact(n) is None or n < 8:
            raise ParseError(f"quaternion order must be a power of 2 >= 8: {name}")
        return quaternion(n)
    m = re.fullmatch(r"E\((\d+),(\d+)\)", name)
    if m:
        return _elementary(int(m.group(1)), int(m.group(2)))
    raise ParseError(f"unknown catalog group: {name}")


_CATALOG_CACHE: dict[str, FiniteGroup] = {}


def catalog_group(name: str) -> FiniteGroup:
    """Group by catalog name, e.g. ``C6``, ``C4xC2``, ``D4``, ``Q8``, ``E(2,3)``."""
    name = name.strip()
    hit = _CATALOG_CACHE.get(name)
    if hit is not None:
        return hit
    parts = [p for p in re.split(r"_x_|x", name) if p]
    if not parts:
        raise ParseError("empty group name")
    if len(parts) == 1:
        G = _atom(parts[0])
    else:
        G = direct_product([_atom(p) for p in parts], label=name)
    G.label = name
    _CATALOG_CACHE[name] = G
    return G


def group_from_json(spec) -> FiniteGroup:
    """Build a group from the JSON forms accepted by the CLI."""
    if isinstance(spec, str):
        return catalog_group(spec)
    kind = spec.get("type")
    if kind == "catalog":
        return catalog_group(spec["name"])
    if kind == "product":
        factors = [group_from_json(f) for f in spec["factors"]]
        label = "x".join(F.label or "?" for F in factors)
        return direct_product(factors, label=label, names=spec.get("generator_names"))
    if kind == "permutations":
        return group_from_permutations(int(spec["degree"]), spec["generators"], label=spec.get("label"))
    raise ParseError(f"unknown group spec: {spec!r}")


CATALOG_NAMES = [
    "C1", "C2", "C3", "C4", "C5", "C6", "C7", "C8", "C9", "C10", "C11", "C12", "C13", "C14", "C15", "C16",
    "C2xC2", "C4xC2", "C2xC2xC2", "C3xC3", "C6xC2", "C4xC4", "C8xC2", "C4xC2xC2", "E(2,4)",
    "D3", "D4", "D5", "D6", "D7", "D8", "Q8", "Q16", "SD16", "M16", "C2xD4", "C2xQ8",
    "A4", "Dic3", "C3xC2xC2", "C3xD4", "Heis27", "E(3,3)", "C9xC3", "C27",
    "C32", "D16", "Q32", "SD32", "E(2,5)", "C4xC8",
]


def catalog(max_order: int | None = None) -> list[FiniteGroup]:
    out = []
    for nm in CATALOG_NAMES:
        G = catalog_group(nm)
        if max_order is None or G.order <= max_order:
            out.append(G)
    return out


# ---------------------------------------------------------------------------
# words and the subgroup mini-language

_TOKEN = re.compile(r"\s*(#\d+|\d+|[A-Za-z]\w*?)(?:\^(-?\d+))?")


def parse_word(G: FiniteGroup, text: str) -> int:
    text = text.strip()
    if text in ("", "1", "e"):
        return 0
    if re.fullmatch(r"\d+", text):
        g = int(text)
        if not 0 <= g < G.order:
            raise ParseError(f"element index out of range: {g}")
        return g
    names = sorted(G.names, key=len, reverse=True)
    out = 0
    pos = 0
    while pos < len(text):
        if text[pos].isspace() or text[pos] == "*":
            pos += 1
            continue
        if text[pos] == "#":
            m = re.match(r"#(\d+)", text[pos:])
            g = int(m.group(1))
            if not 0 <= g < G.order:
                raise ParseError(f"element index out of range: {g}")
            pos += m.end()
        else:
            for nm in names:
                if text.startswith(nm, pos):
                    g = G.names[nm]
                    pos += len(nm)
                    break
            else:
                raise ParseError(f"unknown generator in word {text!r} at {pos}")
        m = re.match(r"\^(-?\d+)", text[pos:])
        if m:
            g = G.power(g, int(m.group(1)))
            pos += m.end()
        out = G.mul(out, g)
    return out


def parse_subgroup_list(G: FiniteGroup, text: str) -> list[Subgroup]:
    """Parse ``"[t],[st]"`` or ``"<s>,<st>,<t>"`` into subgroups.

    Each bracket lists generator words separated by commas; a word is a
    product of named generators with optional integer exponents, or ``#k``
    for the raw element index k.  Empty brackets give the trivial subgroup.
    """
    groups = re.findall(r"[\[<]([^\]>]*)[\]>]", text)
    leftover = re.sub(r"[\[<][^\]>]*[\]>]", "", text).replace(",", "").strip()
    if leftover or not groups:
        raise ParseError(f"cannot parse subgroup list: {text!r}")
    out = []
    for body in groups:
        words = [w for w in body.split(",") if w.strip()]
        out.append(closure(G, [parse_word(G, w) for w in words]))
    return out


def subgroup_label(G: FiniteGroup, H: Subgroup) -> str:
    """Short generator description such as ``<s^2,t>``."""
    if H.order == 1:
        return "<1>"
    gens: list[int] = []
    cur = {0}
    # prefer elements with short names, then small index
    for g in sorted(H.elements, key=lambda x: (len(G.name(x)), x)):
        if g not in cur:
            gens.append(g)
            cur = set(closure(G, gens).elements)
            if len(cur) == H.order:
                break
    return "<" + ",".join(G.name(g) for g in gens) + ">"
